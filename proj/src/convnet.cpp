#include "hfo/convnet.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "hfo/rng.hpp"

namespace hfo::cnn {

LayerSpec LayerSpec::conv(int kernel, int out_channels, int stride) {
    LayerSpec s;
    s.kind = Kind::conv;
    s.kernel = kernel;
    s.channels = out_channels;
    s.stride = stride;
    return s;
}
LayerSpec LayerSpec::relu() {
    LayerSpec s;
    s.kind = Kind::relu;
    return s;
}
LayerSpec LayerSpec::maxpool(int window) {
    LayerSpec s;
    s.kind = Kind::maxpool;
    s.window = window;
    return s;
}
LayerSpec LayerSpec::residual_block(int channels) {
    LayerSpec s;
    s.kind = Kind::residual;
    s.channels = channels;
    return s;
}
LayerSpec LayerSpec::flatten() {
    LayerSpec s;
    s.kind = Kind::flatten;
    return s;
}
LayerSpec LayerSpec::fully_connected(int width) {
    LayerSpec s;
    s.kind = Kind::fully_connected;
    s.width = width;
    return s;
}
LayerSpec LayerSpec::softmax_head(int classes) {
    LayerSpec s;
    s.kind = Kind::softmax_head;
    s.classes = classes;
    return s;
}

ConvNetArch ConvNetArch::compact(int classes, int input_size) {
    ConvNetArch a;
    a.input_size = input_size;
    a.input_channels = 1;
    a.stages = {LayerSpec::conv(3, 8),          LayerSpec::relu(),
                LayerSpec::maxpool(2),          LayerSpec::residual_block(8),
                LayerSpec::maxpool(2),          LayerSpec::flatten(),
                LayerSpec::fully_connected(32), LayerSpec::relu(),
                LayerSpec::softmax_head(classes)};
    return a;
}

namespace {

int add_group(ConvNet& net, const std::string& name, std::size_t size) {
    net.groups.push_back({name, net.theta.size(), size});
    net.theta.resize(net.theta.size() + size, 0.0);
    return static_cast<int>(net.groups.size() - 1);
}

void init_uniform(std::vector<double>& theta, const ParamGroup& g, int fan_in, Rng& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (std::size_t i = 0; i < g.size; ++i)
        theta[g.offset + i] = rng.uniform(-bound, bound);
}

// ---- stage kernels ------------------------------------------------------

void conv_forward(const double* in, Shape is, const double* w, const double* b,
                  int k, int oc, int stride, double* out, Shape os) {
    const int pad = k / 2;
    for (int o = 0; o < oc; ++o) {
        for (int y = 0; y < os.h; ++y) {
            for (int x = 0; x < os.w; ++x) {
                double acc = b[o];
                for (int i = 0; i < is.c; ++i) {
                    const double* wci = w + ((static_cast<std::size_t>(o) * is.c + i) * k) * k;
                    const double* inc = in + static_cast<std::size_t>(i) * is.h * is.w;
                    for (int dy = 0; dy < k; ++dy) {
                        const int sy = y * stride + dy - pad;
                        if (sy < 0 || sy >= is.h) continue;
                        for (int dx = 0; dx < k; ++dx) {
                            const int sx = x * stride + dx - pad;
                            if (sx < 0 || sx >= is.w) continue;
                            acc += wci[dy * k + dx] * inc[sy * is.w + sx];
                        }
                    }
                }
                out[(static_cast<std::size_t>(o) * os.h + y) * os.w + x] = acc;
            }
        }
    }
}

void conv_backward(const double* in, Shape is, const double* w, int k, int oc,
                   int stride, const double* dout, Shape os, double* din,
                   double* dw, double* db) {
    const int pad = k / 2;
    for (int o = 0; o < oc; ++o) {
        for (int y = 0; y < os.h; ++y) {
            for (int x = 0; x < os.w; ++x) {
                const double g = dout[(static_cast<std::size_t>(o) * os.h + y) * os.w + x];
                if (db) db[o] += g;
                for (int i = 0; i < is.c; ++i) {
                    const std::size_t wbase = ((static_cast<std::size_t>(o) * is.c + i) * k) * k;
                    const std::size_t ibase = static_cast<std::size_t>(i) * is.h * is.w;
                    for (int dy = 0; dy < k; ++dy) {
                        const int sy = y * stride + dy - pad;
                        if (sy < 0 || sy >= is.h) continue;
                        for (int dx = 0; dx < k; ++dx) {
                            const int sx = x * stride + dx - pad;
                            if (sx < 0 || sx >= is.w) continue;
                            if (dw) dw[wbase + dy * k + dx] += g * in[ibase + sy * is.w + sx];
                            if (din) din[ibase + sy * is.w + sx] += g * w[wbase + dy * k + dx];
                        }
                    }
                }
            }
        }
    }
}

struct StageCache {
    std::vector<double> out;
    std::vector<double> aux1;    // residual: conv1 pre-activation
    std::vector<double> aux2;    // residual: relu(conv1) activation
    std::vector<int> argmax;     // maxpool
};

} // namespace

ConvNet build_convnet(const ConvNetArch& arch, std::uint64_t seed) {
    if (arch.input_size < 1 || arch.input_channels < 1)
        throw std::invalid_argument("build_convnet: bad input shape");
    ConvNet net;
    net.arch = arch;

    Shape cur{arch.input_channels, arch.input_size, arch.input_size};
    bool flattened = false;
    bool head_seen = false;

    for (std::size_t si = 0; si < arch.stages.size(); ++si) {
        const LayerSpec& s = arch.stages[si];
        if (head_seen)
            throw std::invalid_argument("build_convnet: softmax head must be last");
        StagePlan p;
        p.spec = s;
        p.in = cur;
        switch (s.kind) {
            case LayerSpec::Kind::conv: {
                if (flattened) throw std::invalid_argument("conv after flatten");
                if (s.kernel < 1 || s.channels < 1 || s.stride < 1)
                    throw std::invalid_argument("bad conv spec");
                const int pad = s.kernel / 2;
                p.out = {s.channels, (cur.h + 2 * pad - s.kernel) / s.stride + 1,
                         (cur.w + 2 * pad - s.kernel) / s.stride + 1};
                if (p.out.h < 1 || p.out.w < 1)
                    throw std::invalid_argument("conv output collapses to nothing");
                p.w1 = add_group(net, "conv" + std::to_string(si) + ".w",
                                 static_cast<std::size_t>(s.channels) * cur.c * s.kernel * s.kernel);
                p.b1 = add_group(net, "conv" + std::to_string(si) + ".b",
                                 static_cast<std::size_t>(s.channels));
                break;
            }
            case LayerSpec::Kind::relu:
                p.out = cur;
                break;
            case LayerSpec::Kind::maxpool:
                if (flattened) throw std::invalid_argument("maxpool after flatten");
                if (s.window < 1 || cur.h < s.window || cur.w < s.window)
                    throw std::invalid_argument("bad maxpool window");
                p.out = {cur.c, cur.h / s.window, cur.w / s.window};
                break;
            case LayerSpec::Kind::residual: {
                if (flattened) throw std::invalid_argument("residual after flatten");
                if (s.channels != cur.c)
                    throw std::invalid_argument("residual block channel mismatch");
                p.out = cur;
                const std::size_t wsize =
                    static_cast<std::size_t>(cur.c) * cur.c * 3 * 3;
                p.w1 = add_group(net, "res" + std::to_string(si) + ".w1", wsize);
                p.b1 = add_group(net, "res" + std::to_string(si) + ".b1",
                                 static_cast<std::size_t>(cur.c));
                p.w2 = add_group(net, "res" + std::to_string(si) + ".w2", wsize);
                p.b2 = add_group(net, "res" + std::to_string(si) + ".b2",
                                 static_cast<std::size_t>(cur.c));
                break;
            }
            case LayerSpec::Kind::flatten:
                if (flattened) throw std::invalid_argument("second flatten");
                flattened = true;
                p.out = {cur.count(), 1, 1};
                break;
            case LayerSpec::Kind::fully_connected: {
                if (!flattened) throw std::invalid_argument("fully_connected before flatten");
                if (s.width < 1) throw std::invalid_argument("bad fc width");
                p.out = {s.width, 1, 1};
                p.w1 = add_group(net, "fc" + std::to_string(si) + ".w",
                                 static_cast<std::size_t>(s.width) * cur.count());
                p.b1 = add_group(net, "fc" + std::to_string(si) + ".b",
                                 static_cast<std::size_t>(s.width));
                break;
            }
            case LayerSpec::Kind::softmax_head: {
                if (!flattened) throw std::invalid_argument("softmax head before flatten");
                if (s.classes < 2) throw std::invalid_argument("head needs >= 2 classes");
                head_seen = true;
                net.class_count = s.classes;
                net.feature_dim = cur.count();
                p.out = {s.classes, 1, 1};
                p.w1 = add_group(net, "head.w",
                                 static_cast<std::size_t>(s.classes) * cur.count());
                p.b1 = add_group(net, "head.b", static_cast<std::size_t>(s.classes));
                break;
            }
        }
        cur = p.out;
        net.plan.push_back(p);
    }
    if (!head_seen) throw std::invalid_argument("build_convnet: missing softmax head");

    // fan-in-scaled uniform init, one substream per group
    for (std::size_t gi = 0; gi < net.groups.size(); ++gi) {
        const ParamGroup& g = net.groups[gi];
        if (g.name.ends_with(".b") || g.name.ends_with(".b1") || g.name.ends_with(".b2"))
            continue; // biases start at zero
        int fan_in = 1;
        for (const StagePlan& p : net.plan) {
            const auto owns = [&](int idx) { return idx == static_cast<int>(gi); };
            if (owns(p.w1) || owns(p.w2)) {
                if (p.spec.kind == LayerSpec::Kind::conv)
                    fan_in = p.in.c * p.spec.kernel * p.spec.kernel;
                else if (p.spec.kind == LayerSpec::Kind::residual)
                    fan_in = p.in.c * 3 * 3;
                else
                    fan_in = p.in.count();
            }
        }
        Rng rng = Rng::substream(seed, gi);
        init_uniform(net.theta, g, fan_in, rng);
    }
    return net;
}

std::vector<double> softmax(const std::vector<double>& logits) {
    const double mx = *std::max_element(logits.begin(), logits.end());
    std::vector<double> p(logits.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        p[i] = std::exp(logits[i] - mx);
        sum += p[i];
    }
    for (auto& v : p) v /= sum;
    return p;
}

namespace {

std::vector<StageCache> forward_one(const ConvNet& net, const Image& x) {
    if (static_cast<int>(x.size()) !=
        net.arch.input_channels * net.arch.input_size * net.arch.input_size)
        throw std::invalid_argument("forward: input size mismatch");

    std::vector<StageCache> caches(net.plan.size());
    const std::vector<double>* cur = &x;
    for (std::size_t si = 0; si < net.plan.size(); ++si) {
        const StagePlan& p = net.plan[si];
        StageCache& cache = caches[si];
        cache.out.assign(static_cast<std::size_t>(p.out.count()), 0.0);
        const double* in = cur->data();
        switch (p.spec.kind) {
            case LayerSpec::Kind::conv:
                conv_forward(in, p.in, &net.theta[net.groups[p.w1].offset],
                             &net.theta[net.groups[p.b1].offset], p.spec.kernel,
                             p.spec.channels, p.spec.stride, cache.out.data(), p.out);
                break;
            case LayerSpec::Kind::relu:
                for (std::size_t i = 0; i < cache.out.size(); ++i)
                    cache.out[i] = std::max(0.0, in[i]);
                break;
            case LayerSpec::Kind::maxpool: {
                const int win = p.spec.window;
                cache.argmax.assign(cache.out.size(), 0);
                for (int c = 0; c < p.out.c; ++c) {
                    for (int y = 0; y < p.out.h; ++y) {
                        for (int x2 = 0; x2 < p.out.w; ++x2) {
                            int best_idx = -1;
                            double best = -std::numeric_limits<double>::infinity();
                            for (int dy = 0; dy < win; ++dy) {
                                for (int dx = 0; dx < win; ++dx) {
                                    const int sy = y * win + dy, sx = x2 * win + dx;
                                    const int idx = (c * p.in.h + sy) * p.in.w + sx;
                                    if (in[idx] > best) {
                                        best = in[idx];
                                        best_idx = idx;
                                    }
                                }
                            }
                            const std::size_t oi =
                                (static_cast<std::size_t>(c) * p.out.h + y) * p.out.w + x2;
                            cache.out[oi] = best;
                            cache.argmax[oi] = best_idx;
                        }
                    }
                }
                break;
            }
            case LayerSpec::Kind::residual: {
                cache.aux1.assign(cache.out.size(), 0.0);
                cache.aux2.assign(cache.out.size(), 0.0);
                conv_forward(in, p.in, &net.theta[net.groups[p.w1].offset],
                             &net.theta[net.groups[p.b1].offset], 3, p.in.c, 1,
                             cache.aux1.data(), p.in);
                for (std::size_t i = 0; i < cache.aux2.size(); ++i)
                    cache.aux2[i] = std::max(0.0, cache.aux1[i]);
                conv_forward(cache.aux2.data(), p.in, &net.theta[net.groups[p.w2].offset],
                             &net.theta[net.groups[p.b2].offset], 3, p.in.c, 1,
                             cache.out.data(), p.in);
                for (std::size_t i = 0; i < cache.out.size(); ++i)
                    cache.out[i] = std::max(0.0, cache.out[i] + in[i]);
                break;
            }
            case LayerSpec::Kind::flatten:
                std::copy(cur->begin(), cur->end(), cache.out.begin());
                break;
            case LayerSpec::Kind::fully_connected:
            case LayerSpec::Kind::softmax_head: {
                const int out_n = p.out.count();
                const int in_n = p.in.count();
                const double* w = &net.theta[net.groups[p.w1].offset];
                const double* b = &net.theta[net.groups[p.b1].offset];
                for (int o = 0; o < out_n; ++o) {
                    double acc = b[o];
                    const double* wrow = w + static_cast<std::size_t>(o) * in_n;
                    for (int i = 0; i < in_n; ++i) acc += wrow[i] * in[i];
                    cache.out[o] = acc;
                }
                break;
            }
        }
        cur = &cache.out;
    }
    return caches;
}

void backward_one(const ConvNet& net, const Image& x,
                  const std::vector<StageCache>& caches,
                  std::vector<double> dout, std::vector<double>& grads) {
    for (long si = static_cast<long>(net.plan.size()) - 1; si >= 0; --si) {
        const StagePlan& p = net.plan[si];
        const StageCache& cache = caches[si];
        const double* in = (si == 0) ? x.data() : caches[si - 1].out.data();
        std::vector<double> din(static_cast<std::size_t>(p.in.count()), 0.0);
        switch (p.spec.kind) {
            case LayerSpec::Kind::conv:
                conv_backward(in, p.in, &net.theta[net.groups[p.w1].offset], p.spec.kernel,
                              p.spec.channels, p.spec.stride, dout.data(), p.out,
                              din.data(), &grads[net.groups[p.w1].offset],
                              &grads[net.groups[p.b1].offset]);
                break;
            case LayerSpec::Kind::relu:
                for (std::size_t i = 0; i < dout.size(); ++i)
                    din[i] = (in[i] > 0.0) ? dout[i] : 0.0;
                break;
            case LayerSpec::Kind::maxpool:
                for (std::size_t i = 0; i < dout.size(); ++i)
                    din[cache.argmax[i]] += dout[i];
                break;
            case LayerSpec::Kind::residual: {
                // y = relu(conv2(relu(conv1(x))) + x)
                std::vector<double> dsum(dout.size());
                for (std::size_t i = 0; i < dout.size(); ++i)
                    dsum[i] = (cache.out[i] > 0.0) ? dout[i] : 0.0;
                std::vector<double> drelu1(dout.size(), 0.0);
                conv_backward(cache.aux2.data(), p.in, &net.theta[net.groups[p.w2].offset],
                              3, p.in.c, 1, dsum.data(), p.in, drelu1.data(),
                              &grads[net.groups[p.w2].offset],
                              &grads[net.groups[p.b2].offset]);
                for (std::size_t i = 0; i < drelu1.size(); ++i)
                    if (cache.aux1[i] <= 0.0) drelu1[i] = 0.0;
                conv_backward(in, p.in, &net.theta[net.groups[p.w1].offset], 3, p.in.c,
                              1, drelu1.data(), p.in, din.data(),
                              &grads[net.groups[p.w1].offset],
                              &grads[net.groups[p.b1].offset]);
                for (std::size_t i = 0; i < din.size(); ++i) din[i] += dsum[i];
                break;
            }
            case LayerSpec::Kind::flatten:
                din = dout;
                break;
            case LayerSpec::Kind::fully_connected:
            case LayerSpec::Kind::softmax_head: {
                const int out_n = p.out.count();
                const int in_n = p.in.count();
                const double* w = &net.theta[net.groups[p.w1].offset];
                double* dw = &grads[net.groups[p.w1].offset];
                double* db = &grads[net.groups[p.b1].offset];
                for (int o = 0; o < out_n; ++o) {
                    const double g = dout[o];
                    db[o] += g;
                    const double* wrow = w + static_cast<std::size_t>(o) * in_n;
                    double* dwrow = dw + static_cast<std::size_t>(o) * in_n;
                    for (int i = 0; i < in_n; ++i) {
                        dwrow[i] += g * in[i];
                        din[i] += g * wrow[i];
                    }
                }
                break;
            }
        }
        dout = std::move(din);
    }
}

} // namespace

Forward forward(const ConvNet& net, const std::vector<Image>& batch) {
    Forward f;
    f.logits.reserve(batch.size());
    f.probabilities.reserve(batch.size());
    f.features.reserve(batch.size());
    f.activations.reserve(batch.size());
    const std::size_t head = net.plan.size() - 1;
    for (const Image& x : batch) {
        auto caches = forward_one(net, x);
        f.logits.push_back(caches[head].out);
        f.probabilities.push_back(softmax(caches[head].out));
        f.features.push_back(head == 0 ? x : caches[head - 1].out);
        std::vector<std::vector<double>> acts;
        acts.reserve(caches.size());
        for (auto& c : caches) acts.push_back(std::move(c.out));
        f.activations.push_back(std::move(acts));
    }
    return f;
}

LossGrad loss_and_grad(const ConvNet& net, const std::vector<Image>& batch,
                       const std::vector<int>& labels) {
    if (batch.empty()) throw std::invalid_argument("loss_and_grad: empty batch");
    if (batch.size() != labels.size())
        throw std::invalid_argument("loss_and_grad: label count mismatch");

    LossGrad lg;
    lg.grads.assign(net.theta.size(), 0.0);
    lg.predictions.resize(batch.size());
    const double inv_n = 1.0 / static_cast<double>(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
        if (labels[i] < 0 || labels[i] >= net.class_count)
            throw std::invalid_argument("loss_and_grad: label out of range");
        auto caches = forward_one(net, batch[i]);
        const std::vector<double>& logits = caches.back().out;
        const std::vector<double> p = softmax(logits);
        lg.predictions[i] =
            static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
        lg.loss -= std::log(std::max(p[labels[i]], 1e-300)) * inv_n;
        std::vector<double> dlogits(p.size());
        for (std::size_t j = 0; j < p.size(); ++j)
            dlogits[j] = (p[j] - (static_cast<int>(j) == labels[i] ? 1.0 : 0.0)) * inv_n;
        backward_one(net, batch[i], caches, std::move(dlogits), lg.grads);
    }
    return lg;
}

void adam_step(AdamState& state, std::vector<double>& params,
               const std::vector<double>& grads, const TrainHyper& hyper) {
    if (params.size() != grads.size())
        throw std::invalid_argument("adam_step: shape mismatch");
    if (state.m.empty()) {
        state.m.assign(params.size(), 0.0);
        state.v.assign(params.size(), 0.0);
    }
    if (state.m.size() != params.size())
        throw std::invalid_argument("adam_step: state shape mismatch");
    ++state.step;
    const double b1 = hyper.adam_beta1, b2 = hyper.adam_beta2;
    const double bias1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
    const double bias2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
    const double alpha = hyper.lr * std::sqrt(bias2) / bias1;
    for (std::size_t i = 0; i < params.size(); ++i) {
        state.m[i] = b1 * state.m[i] + (1.0 - b1) * grads[i];
        state.v[i] = b2 * state.v[i] + (1.0 - b2) * grads[i] * grads[i];
        params[i] -= alpha * state.m[i] / (std::sqrt(state.v[i]) + hyper.adam_eps);
    }
}

TrainResult train_convnet(const std::vector<Image>& images, const std::vector<int>& labels,
                          const ConvNetArch& arch, const TrainHyper& hyper) {
    if (images.empty() || images.size() != labels.size())
        throw std::invalid_argument("train_convnet: bad dataset");
    if (!(hyper.lr > 0.0) || hyper.batch_size < 1 || hyper.epochs < 0)
        throw std::invalid_argument("train_convnet: bad hyperparameters");

    TrainResult result;
    result.net = build_convnet(arch, rng::mix(hyper.seed, 0x1217));
    const int classes = result.net.class_count;
    std::vector<int> counts(classes, 0);
    for (int l : labels) {
        if (l < 0 || l >= classes)
            throw std::invalid_argument("train_convnet: label out of range");
        ++counts[l];
    }
    for (int j = 0; j < classes; ++j)
        if (counts[j] == 0)
            throw std::invalid_argument("train_convnet: class " + std::to_string(j) +
                                        " absent from training data");

    AdamState adam;
    std::vector<std::size_t> order(images.size());
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
        Rng shuffle_rng = Rng::substream(hyper.seed, 0xE000 + static_cast<std::uint64_t>(epoch));
        shuffle_rng.shuffle(order);

        double epoch_loss = 0.0;
        long correct = 0;
        std::size_t seen = 0;
        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(hyper.batch_size)) {
            const std::size_t end =
                std::min(order.size(), start + static_cast<std::size_t>(hyper.batch_size));
            std::vector<Image> batch;
            std::vector<int> batch_labels;
            batch.reserve(end - start);
            for (std::size_t i = start; i < end; ++i) {
                batch.push_back(images[order[i]]);
                batch_labels.push_back(labels[order[i]]);
            }
            // training-loss bookkeeping uses the pre-update forward pass
            LossGrad lg = loss_and_grad(result.net, batch, batch_labels);
            for (std::size_t i = 0; i < batch.size(); ++i)
                if (lg.predictions[i] == batch_labels[i]) ++correct;
            epoch_loss += lg.loss * static_cast<double>(batch.size());
            seen += batch.size();
            adam_step(adam, result.net.theta, lg.grads, hyper);
        }
        result.history.push_back({epoch_loss / static_cast<double>(seen),
                                  static_cast<double>(correct) / static_cast<double>(seen)});
    }
    return result;
}

std::vector<double> extract_features(const ConvNet& net, const Image& image) {
    Forward f = forward(net, {image});
    return f.features[0];
}

} // namespace hfo::cnn
