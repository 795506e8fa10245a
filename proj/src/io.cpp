#include "hfo/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hfo::io {

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw std::runtime_error("malformed number: '" + s + "'");
    return v;
}

namespace {

constexpr int kDatasetFormatVersion = 1;

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = s.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

[[noreturn]] void parse_fail(const std::string& path, std::size_t line, const std::string& what) {
    throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

} // namespace

void write_dataset(const LabeledDataset& ds, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);

    std::string classes;
    for (EventClass c : profile_classes(ds.profile)) {
        if (!classes.empty()) classes += ',';
        classes += to_string(c);
    }
    const double fs = ds.segments.empty() ? 0.0 : ds.segments[0].fs_hz;
    const double window = ds.segments.empty() ? 0.0 : ds.segments[0].params.window_s;
    f << "hfo-dataset format_version=" << kDatasetFormatVersion
      << " profile=" << ds.profile << " fs_hz=" << format_double(fs)
      << " window_s=" << format_double(window) << " master_seed=" << ds.master_seed
      << " classes=" << classes << " count=" << ds.segments.size() << "\n";

    for (const SignalSegment& seg : ds.segments) {
        const EventParams& p = seg.params;
        f << seg.event_id << ',' << to_string(seg.label) << ','
          << format_double(p.osc_freq_hz) << ',' << format_double(p.burst_dur_s) << ','
          << format_double(p.rel_amplitude) << ','
          << (p.snr_db ? format_double(*p.snr_db) : std::string("clean")) << ','
          << format_double(p.overlap_frac) << ',' << format_double(p.fs_hz) << ','
          << format_double(p.window_s);
        for (double s : seg.samples) f << ',' << format_double(s);
        f << '\n';
    }
    if (!f) throw std::runtime_error("write failed: " + path);
}

LabeledDataset read_dataset(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path);

    std::string header;
    if (!std::getline(f, header)) parse_fail(path, 1, "empty file");
    const auto tokens = split(header, ' ');
    if (tokens.empty() || tokens[0] != "hfo-dataset")
        parse_fail(path, 1, "not a dataset file (bad magic)");

    LabeledDataset ds;
    long expected_count = -1;
    int version = -1;
    for (std::size_t i = 1; i < tokens.size(); ++i) {
        const auto kv = split(tokens[i], '=');
        if (kv.size() != 2) parse_fail(path, 1, "bad header token '" + tokens[i] + "'");
        if (kv[0] == "format_version") version = std::stoi(kv[1]);
        else if (kv[0] == "profile") ds.profile = kv[1];
        else if (kv[0] == "master_seed") ds.master_seed = std::stoull(kv[1]);
        else if (kv[0] == "count") expected_count = std::stol(kv[1]);
        // fs_hz / window_s / classes are informational; every record carries them
    }
    if (version != kDatasetFormatVersion)
        throw std::runtime_error(path + ": unsupported dataset format_version " +
                                 std::to_string(version));
    if (ds.profile.empty()) parse_fail(path, 1, "missing profile");

    std::string line;
    std::size_t line_no = 1;
    while (std::getline(f, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split(line, ',');
        if (fields.size() < 10) parse_fail(path, line_no, "truncated record");
        SignalSegment seg;
        try {
            seg.event_id = std::stoll(fields[0]);
            seg.label = event_class_from_string(fields[1]);
            seg.params.osc_freq_hz = parse_double(fields[2]);
            seg.params.burst_dur_s = parse_double(fields[3]);
            seg.params.rel_amplitude = parse_double(fields[4]);
            if (fields[5] == "clean") seg.params.snr_db.reset();
            else seg.params.snr_db = parse_double(fields[5]);
            seg.params.overlap_frac = parse_double(fields[6]);
            seg.params.fs_hz = parse_double(fields[7]);
            seg.params.window_s = parse_double(fields[8]);
            seg.fs_hz = seg.params.fs_hz;
            const std::size_t n_samples =
                static_cast<std::size_t>(std::floor(seg.params.fs_hz * seg.params.window_s));
            if (fields.size() - 9 != n_samples)
                parse_fail(path, line_no,
                           "expected " + std::to_string(n_samples) + " samples, found " +
                               std::to_string(fields.size() - 9));
            seg.samples.reserve(n_samples);
            for (std::size_t i = 9; i < fields.size(); ++i)
                seg.samples.push_back(parse_double(fields[i]));
        } catch (const std::runtime_error&) {
            throw;
        } catch (const std::exception& e) {
            parse_fail(path, line_no, e.what());
        }
        ds.segments.push_back(std::move(seg));
    }
    if (expected_count >= 0 && static_cast<long>(ds.segments.size()) != expected_count)
        parse_fail(path, line_no + 1,
                   "file ends after " + std::to_string(ds.segments.size()) +
                       " of " + std::to_string(expected_count) + " records");
    return ds;
}

void write_tfmap_pgm(const tfr::TimeFrequencyMap& map, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << "P5\n" << map.size << ' ' << map.size << "\n65535\n";
    for (double v : map.values) {
        const long pix = std::lround(std::min(std::max(v, 0.0), 1.0) * 65535.0);
        const unsigned char hi = static_cast<unsigned char>((pix >> 8) & 0xFF);
        const unsigned char lo = static_cast<unsigned char>(pix & 0xFF);
        f.put(static_cast<char>(hi));
        f.put(static_cast<char>(lo));
    }
    if (!f) throw std::runtime_error("write failed: " + path);
}

// ---- binary model container ----------------------------------------------

namespace {

constexpr std::uint32_t kModelFormatVersion = 1;
const char kModelMagic[4] = {'H', 'F', 'O', 'M'};

class Writer {
public:
    explicit Writer(const std::string& path) : f_(path, std::ios::binary), path_(path) {
        if (!f_) throw std::runtime_error("cannot open for writing: " + path);
    }
    void u8(std::uint8_t v) { f_.put(static_cast<char>(v)); }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) u8(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
    }
    void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    void str(const std::string& s) {
        u32(static_cast<std::uint32_t>(s.size()));
        f_.write(s.data(), static_cast<long>(s.size()));
    }
    void vec(const std::vector<double>& v) {
        u64(v.size());
        for (double x : v) f64(x);
    }
    void done() {
        f_.flush();
        if (!f_) throw std::runtime_error("write failed: " + path_);
    }

private:
    std::ofstream f_;
    std::string path_;
};

class Reader {
public:
    explicit Reader(const std::string& path) : f_(path, std::ios::binary), path_(path) {
        if (!f_) throw std::runtime_error("cannot open: " + path);
    }
    std::uint8_t u8() {
        const int c = f_.get();
        if (c == EOF) throw std::runtime_error(path_ + ": unexpected end of model file");
        return static_cast<std::uint8_t>(c);
    }
    std::uint32_t u32() {
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(u8()) << (8 * i);
        return v;
    }
    std::uint64_t u64() {
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(u8()) << (8 * i);
        return v;
    }
    std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
    double f64() { return std::bit_cast<double>(u64()); }
    std::string str() {
        const std::uint32_t n = u32();
        std::string s(n, '\0');
        f_.read(s.data(), n);
        if (f_.gcount() != static_cast<long>(n))
            throw std::runtime_error(path_ + ": unexpected end of model file");
        return s;
    }
    std::vector<double> vec() {
        const std::uint64_t n = u64();
        std::vector<double> v(n);
        for (auto& x : v) x = f64();
        return v;
    }
    const std::string& path() const { return path_; }

private:
    std::ifstream f_;
    std::string path_;
};

void write_svm_config(Writer& w, const svm::SvmConfig& c) {
    w.u8(c.kind == svm::KernelSpec::Kind::linear ? 0 : 1);
    w.u8(c.gamma ? 1 : 0);
    w.f64(c.gamma ? *c.gamma : 0.0);
    w.f64(c.C);
    w.f64(c.tol);
    w.i32(c.max_epochs);
    w.u64(c.seed);
}

svm::SvmConfig read_svm_config(Reader& r) {
    svm::SvmConfig c;
    c.kind = r.u8() == 0 ? svm::KernelSpec::Kind::linear : svm::KernelSpec::Kind::rbf;
    const bool has_gamma = r.u8() != 0;
    const double gamma = r.f64();
    if (has_gamma) c.gamma = gamma;
    c.C = r.f64();
    c.tol = r.f64();
    c.max_epochs = r.i32();
    c.seed = r.u64();
    return c;
}

void write_config(Writer& w, const pipeline::PipelineConfig& c) {
    w.u8(static_cast<std::uint8_t>(c.kind));
    w.i32(c.scfg.size);
    w.f64(c.scfg.fmin_hz);
    w.f64(c.scfg.fmax_hz);
    w.i32(c.scfg.voices);
    w.u8(static_cast<std::uint8_t>(c.scheme));
    write_svm_config(w, c.svm_cfg);
    w.f64(c.hyper.lr);
    w.i32(c.hyper.batch_size);
    w.i32(c.hyper.epochs);
    w.f64(c.hyper.adam_beta1);
    w.f64(c.hyper.adam_beta2);
    w.f64(c.hyper.adam_eps);
    w.u64(c.hyper.seed);
    w.i32(c.pool_size);
    w.f64(c.train_frac);
    w.u64(c.seed);
}

pipeline::PipelineConfig read_config(Reader& r) {
    pipeline::PipelineConfig c;
    c.kind = static_cast<pipeline::ModelKind>(r.u8());
    c.scfg.size = r.i32();
    c.scfg.fmin_hz = r.f64();
    c.scfg.fmax_hz = r.f64();
    c.scfg.voices = r.i32();
    c.scheme = static_cast<ecoc::CodingScheme>(r.u8());
    c.svm_cfg = read_svm_config(r);
    c.hyper.lr = r.f64();
    c.hyper.batch_size = r.i32();
    c.hyper.epochs = r.i32();
    c.hyper.adam_beta1 = r.f64();
    c.hyper.adam_beta2 = r.f64();
    c.hyper.adam_eps = r.f64();
    c.hyper.seed = r.u64();
    c.pool_size = r.i32();
    c.train_frac = r.f64();
    c.seed = r.u64();
    return c;
}

void write_binary_svm(Writer& w, const svm::BinarySvmModel& m) {
    w.u8(m.constant ? 1 : 0);
    w.f64(m.bias);
    w.u8(m.kernel.kind == svm::KernelSpec::Kind::linear ? 0 : 1);
    w.f64(m.kernel.gamma);
    w.f64(m.C);
    w.vec(m.scaler.mean);
    w.vec(m.scaler.inv_std);
    w.u32(static_cast<std::uint32_t>(m.support_vectors.size()));
    w.u32(m.support_vectors.empty()
              ? 0
              : static_cast<std::uint32_t>(m.support_vectors[0].size()));
    for (const auto& sv : m.support_vectors)
        for (double v : sv) w.f64(v);
    w.vec(m.alphas_signed);
    w.u32(static_cast<std::uint32_t>(m.sv_indices.size()));
    for (int idx : m.sv_indices) w.i32(idx);
}

svm::BinarySvmModel read_binary_svm(Reader& r) {
    svm::BinarySvmModel m;
    m.constant = r.u8() != 0;
    m.bias = r.f64();
    m.kernel.kind = r.u8() == 0 ? svm::KernelSpec::Kind::linear : svm::KernelSpec::Kind::rbf;
    m.kernel.gamma = r.f64();
    m.C = r.f64();
    m.scaler.mean = r.vec();
    m.scaler.inv_std = r.vec();
    const std::uint32_t n_sv = r.u32();
    const std::uint32_t dim = r.u32();
    m.support_vectors.assign(n_sv, std::vector<double>(dim));
    for (auto& sv : m.support_vectors)
        for (auto& v : sv) v = r.f64();
    m.alphas_signed = r.vec();
    const std::uint32_t n_idx = r.u32();
    m.sv_indices.resize(n_idx);
    for (auto& idx : m.sv_indices) idx = r.i32();
    return m;
}

void write_ecoc(Writer& w, const ecoc::EcocModel& m) {
    w.i32(m.matrix.rows);
    w.i32(m.matrix.cols);
    w.u8(static_cast<std::uint8_t>(m.matrix.scheme));
    for (std::int8_t e : m.matrix.entries) w.u8(static_cast<std::uint8_t>(e + 1));
    w.i32(m.feature_dim);
    w.u32(static_cast<std::uint32_t>(m.classifiers.size()));
    for (const auto& c : m.classifiers) write_binary_svm(w, c);
}

ecoc::EcocModel read_ecoc(Reader& r, const std::vector<std::string>& class_names) {
    ecoc::EcocModel m;
    m.matrix.rows = r.i32();
    m.matrix.cols = r.i32();
    m.matrix.scheme = static_cast<ecoc::CodingScheme>(r.u8());
    m.matrix.entries.resize(static_cast<std::size_t>(m.matrix.rows) * m.matrix.cols);
    for (auto& e : m.matrix.entries) e = static_cast<std::int8_t>(static_cast<int>(r.u8()) - 1);
    m.feature_dim = r.i32();
    m.classifiers.resize(r.u32());
    for (auto& c : m.classifiers) c = read_binary_svm(r);
    m.class_names = class_names;
    return m;
}

void write_convnet(Writer& w, const cnn::ConvNet& net) {
    w.i32(net.arch.input_size);
    w.i32(net.arch.input_channels);
    w.u32(static_cast<std::uint32_t>(net.arch.stages.size()));
    for (const cnn::LayerSpec& s : net.arch.stages) {
        w.u8(static_cast<std::uint8_t>(s.kind));
        w.i32(s.kernel);
        w.i32(s.channels);
        w.i32(s.stride);
        w.i32(s.window);
        w.i32(s.width);
        w.i32(s.classes);
    }
    w.vec(net.theta);
}

cnn::ConvNet read_convnet(Reader& r) {
    cnn::ConvNetArch arch;
    arch.input_size = r.i32();
    arch.input_channels = r.i32();
    const std::uint32_t n = r.u32();
    arch.stages.resize(n);
    for (auto& s : arch.stages) {
        s.kind = static_cast<cnn::LayerSpec::Kind>(r.u8());
        s.kernel = r.i32();
        s.channels = r.i32();
        s.stride = r.i32();
        s.window = r.i32();
        s.width = r.i32();
        s.classes = r.i32();
    }
    cnn::ConvNet net = cnn::build_convnet(arch, 0);
    std::vector<double> theta = r.vec();
    if (theta.size() != net.theta.size())
        throw std::runtime_error(r.path() + ": parameter payload does not match architecture");
    net.theta = std::move(theta);
    return net;
}

} // namespace

void save_model(const pipeline::TrainedModel& model, const std::string& path) {
    Writer w(path);
    for (char c : kModelMagic) w.u8(static_cast<std::uint8_t>(c));
    w.u32(kModelFormatVersion);
    w.u8(static_cast<std::uint8_t>(model.kind));
    write_config(w, model.cfg);
    w.u32(static_cast<std::uint32_t>(model.class_names.size()));
    for (const auto& name : model.class_names) w.str(name);
    switch (model.kind) {
        case pipeline::ModelKind::svm:
            write_ecoc(w, *model.svm_model);
            break;
        case pipeline::ModelKind::cnn:
            write_convnet(w, *model.cnn_model);
            break;
        case pipeline::ModelKind::hybrid:
            write_convnet(w, model.hybrid_model->feature_net);
            write_ecoc(w, model.hybrid_model->ecoc_model);
            break;
    }
    w.done();
}

pipeline::TrainedModel load_model(const std::string& path) {
    Reader r(path);
    for (char c : kModelMagic)
        if (r.u8() != static_cast<std::uint8_t>(c))
            throw std::runtime_error(path + ": not a model file (bad magic)");
    const std::uint32_t version = r.u32();
    if (version != kModelFormatVersion)
        throw std::runtime_error(path + ": unsupported model format_version " +
                                 std::to_string(version));
    pipeline::TrainedModel model;
    model.kind = static_cast<pipeline::ModelKind>(r.u8());
    model.cfg = read_config(r);
    const std::uint32_t n_classes = r.u32();
    model.class_names.resize(n_classes);
    for (auto& name : model.class_names) name = r.str();
    switch (model.kind) {
        case pipeline::ModelKind::svm:
            model.svm_model = read_ecoc(r, model.class_names);
            break;
        case pipeline::ModelKind::cnn:
            model.cnn_model = read_convnet(r);
            break;
        case pipeline::ModelKind::hybrid: {
            hybrid::HybridModel hm;
            hm.feature_net = read_convnet(r);
            hm.ecoc_model = read_ecoc(r, model.class_names);
            hm.scalogram_cfg = model.cfg.scfg;
            model.hybrid_model = std::move(hm);
            break;
        }
        default:
            throw std::runtime_error(path + ": unknown model kind");
    }
    return model;
}

// ---- CSV outputs ----------------------------------------------------------

namespace {

void metrics_row(std::ostringstream& out, const std::string& name,
                 const eval::ClassMetrics& m) {
    out << name << ',' << format_double(m.precision) << ',' << format_double(m.f1)
        << ',' << format_double(m.specificity) << ',' << format_double(m.sensitivity)
        << ',' << format_double(m.accuracy) << ',' << (m.zero_division ? 1 : 0) << '\n';
}

} // namespace

std::string report_csv_string(const eval::EvaluationReport& report) {
    std::ostringstream out;
    out << "# confusion_matrix\n";
    out << "true\\pred";
    for (const auto& n : report.class_names) out << ',' << n;
    out << '\n';
    for (int i = 0; i < report.cm.classes; ++i) {
        out << report.class_names[i];
        for (int j = 0; j < report.cm.classes; ++j) out << ',' << report.cm.at(i, j);
        out << '\n';
    }
    out << "# metrics\n";
    out << "class,precision,f1,specificity,sensitivity,accuracy,zero_division\n";
    for (std::size_t j = 0; j < report.per_class.size(); ++j)
        metrics_row(out, report.class_names[j], report.per_class[j]);
    metrics_row(out, "macro", report.macro);
    if (!report.auc.empty()) {
        out << "# auc\n";
        out << "class,auc\n";
        for (std::size_t j = 0; j < report.auc.size(); ++j)
            out << report.class_names[j] << ',' << format_double(report.auc[j]) << '\n';
    }
    return out.str();
}

void write_report_csv(const eval::EvaluationReport& report, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << report_csv_string(report);
    if (!f) throw std::runtime_error("write failed: " + path);
}

void write_kfold_csv(const std::vector<eval::EvaluationReport>& folds,
                     const eval::EvaluationReport& pooled, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    std::ostringstream out;
    out << "fold,precision,f1,specificity,sensitivity,accuracy,zero_division\n";
    for (std::size_t k = 0; k < folds.size(); ++k)
        metrics_row(out, std::to_string(k), folds[k].macro);
    metrics_row(out, "aggregate", pooled.macro);
    f << out.str();
    if (!f) throw std::runtime_error("write failed: " + path);
}

void write_roc_csv(const eval::EvaluationReport& report, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << "class,fpr,tpr\n";
    for (std::size_t j = 0; j < report.roc.size(); ++j)
        for (const auto& [fpr, tpr] : report.roc[j])
            f << report.class_names[j] << ',' << format_double(fpr) << ','
              << format_double(tpr) << '\n';
    if (!f) throw std::runtime_error("write failed: " + path);
}

void write_history_csv(const std::vector<cnn::EpochStats>& history, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << "epoch,loss,accuracy\n";
    for (std::size_t e = 0; e < history.size(); ++e)
        f << e << ',' << format_double(history[e].loss) << ','
          << format_double(history[e].accuracy) << '\n';
    if (!f) throw std::runtime_error("write failed: " + path);
}

} // namespace hfo::io
