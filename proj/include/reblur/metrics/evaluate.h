#ifndef REBLUR_METRICS_EVALUATE_H_
#define REBLUR_METRICS_EVALUATE_H_

#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "reblur/data/dataset.h"
#include "reblur/data/image.h"
#include "reblur/models/network.h"

namespace reblur {

// Plug-in metric such as LPIPS or NIQE supplied by the caller. Must be pure:
// fn(output, reference) -> scalar.
struct ExternalMetric {
  std::string name;
  std::function<double(const ImageTensor& output, const ImageTensor& reference)> fn;
};

struct MetricsRow {
  std::string id;
  double psnr_db = 0.0;
  double ssim = 0.0;
  std::map<std::string, double> extras;
};

struct MetricsReport {
  std::vector<MetricsRow> rows;

  // Arithmetic mean of every column; id is "mean".
  MetricsRow Aggregate() const;

  // Header "id,psnr_db,ssim[,extras...]", one line per row, then the
  // aggregate line.
  std::string ToCsv() const;
};

// Row id for pair i: the record id when known, otherwise i; zero padded.
std::string PairId(const Dataset& dataset, std::size_t i);

// Deblurred outputs M_D(B) for every pair, clipped to [0,1].
std::vector<ImageTensor> DeblurAll(const Network& deblur, const Dataset& dataset);

// Metrics of outputs[i] against dataset.pairs[i].sharp.
MetricsReport EvaluateOutputs(std::span<const ImageTensor> outputs,
                              const Dataset& dataset,
                              std::span<const ExternalMetric> external = {});

MetricsReport Evaluate(const Network& deblur, const Dataset& dataset,
                       std::span<const ExternalMetric> external = {});

// The blurry inputs scored against the sharp targets.
MetricsReport EvaluateBlurryBaseline(const Dataset& dataset);

}  // namespace reblur

#endif  // REBLUR_METRICS_EVALUATE_H_
