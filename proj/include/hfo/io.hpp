#pragma once

#include <string>
#include <vector>

#include "hfo/eval.hpp"
#include "hfo/pipeline.hpp"
#include "hfo/signal.hpp"
#include "hfo/tfr.hpp"

namespace hfo::io {

// Shortest decimal string that parses back to the identical double.
std::string format_double(double v);
double parse_double(const std::string& s);

// Line-oriented text format: one header line of key=value pairs, then one
// line per segment (event_id, label, params, samples) with round-trip
// precision. write/read is bit-exact.
void write_dataset(const LabeledDataset& ds, const std::string& path);
LabeledDataset read_dataset(const std::string& path);

// 16-bit binary PGM, row 0 = highest frequency, values rounded to 0..65535.
void write_tfmap_pgm(const tfr::TimeFrequencyMap& map, const std::string& path);

// Binary model container; load(save(m)) predicts bit-identically.
void save_model(const pipeline::TrainedModel& model, const std::string& path);
pipeline::TrainedModel load_model(const std::string& path);

// Metrics CSV: confusion matrix block, then per-class + macro metric rows in
// the order precision,f1,specificity,sensitivity,accuracy, then AUC block.
void write_report_csv(const eval::EvaluationReport& report, const std::string& path);
std::string report_csv_string(const eval::EvaluationReport& report);

// One macro-metrics row per fold plus the pooled aggregate row.
void write_kfold_csv(const std::vector<eval::EvaluationReport>& folds,
                     const eval::EvaluationReport& pooled, const std::string& path);

// class,fpr,tpr rows for every per-class ROC curve in the report.
void write_roc_csv(const eval::EvaluationReport& report, const std::string& path);

// epoch,loss,accuracy rows.
void write_history_csv(const std::vector<cnn::EpochStats>& history, const std::string& path);

} // namespace hfo::io
