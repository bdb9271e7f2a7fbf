#include "reblur/metrics/evaluate.h"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

#include "reblur/metrics/quality.h"

namespace reblur {
namespace {

std::string FormatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string CsvLine(const MetricsRow& row, const std::vector<std::string>& extras) {
  std::string line = row.id + "," + FormatDouble(row.psnr_db) + "," + FormatDouble(row.ssim);
  for (const std::string& name : extras) {
    auto it = row.extras.find(name);
    line += "," + (it == row.extras.end() ? std::string() : FormatDouble(it->second));
  }
  return line;
}

}  // namespace

MetricsRow MetricsReport::Aggregate() const {
  MetricsRow agg;
  agg.id = "mean";
  if (rows.empty()) return agg;
  std::map<std::string, int> extra_counts;
  for (const MetricsRow& r : rows) {
    agg.psnr_db += r.psnr_db;
    agg.ssim += r.ssim;
    for (const auto& [name, v] : r.extras) {
      agg.extras[name] += v;
      ++extra_counts[name];
    }
  }
  agg.psnr_db /= static_cast<double>(rows.size());
  agg.ssim /= static_cast<double>(rows.size());
  for (auto& [name, v] : agg.extras) v /= extra_counts[name];
  return agg;
}

std::string MetricsReport::ToCsv() const {
  std::vector<std::string> extras;
  for (const MetricsRow& r : rows) {
    for (const auto& [name, v] : r.extras) {
      if (std::find(extras.begin(), extras.end(), name) == extras.end()) {
        extras.push_back(name);
      }
    }
  }
  std::string csv = "id,psnr_db,ssim";
  for (const std::string& e : extras) csv += "," + e;
  csv += "\n";
  for (const MetricsRow& r : rows) csv += CsvLine(r, extras) + "\n";
  csv += CsvLine(Aggregate(), extras) + "\n";
  return csv;
}

std::string PairId(const Dataset& dataset, std::size_t i) {
  const std::size_t id =
      dataset.records.size() == dataset.size() ? dataset.records[i].id : i;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%06zu", id);
  return buf;
}

std::vector<ImageTensor> DeblurAll(const Network& deblur, const Dataset& dataset) {
  std::vector<ImageTensor> out;
  out.reserve(dataset.size());
  for (const ImagePair& pair : dataset.pairs) {
    out.push_back(deblur.Evaluate(pair.blurry).Clipped());
  }
  return out;
}

MetricsReport EvaluateOutputs(std::span<const ImageTensor> outputs,
                              const Dataset& dataset,
                              std::span<const ExternalMetric> external) {
  if (outputs.size() != dataset.size()) {
    throw std::invalid_argument("EvaluateOutputs: output count does not match dataset");
  }
  MetricsReport report;
  report.rows.reserve(outputs.size());
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    const ImageTensor& sharp = dataset.pairs[i].sharp;
    MetricsRow row;
    row.id = PairId(dataset, i);
    row.psnr_db = Psnr(outputs[i], sharp);
    row.ssim = SsimPerChannel(outputs[i], sharp);
    for (const ExternalMetric& m : external) row.extras[m.name] = m.fn(outputs[i], sharp);
    report.rows.push_back(std::move(row));
  }
  return report;
}

MetricsReport Evaluate(const Network& deblur, const Dataset& dataset,
                       std::span<const ExternalMetric> external) {
  const std::vector<ImageTensor> outputs = DeblurAll(deblur, dataset);
  return EvaluateOutputs(outputs, dataset, external);
}

MetricsReport EvaluateBlurryBaseline(const Dataset& dataset) {
  std::vector<ImageTensor> inputs;
  inputs.reserve(dataset.size());
  for (const ImagePair& p : dataset.pairs) inputs.push_back(p.blurry);
  return EvaluateOutputs(inputs, dataset);
}

}  // namespace reblur
