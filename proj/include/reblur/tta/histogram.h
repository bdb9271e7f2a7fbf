#ifndef REBLUR_TTA_HISTOGRAM_H_
#define REBLUR_TTA_HISTOGRAM_H_

#include "reblur/data/image.h"

namespace reblur {

// Per-channel histogram matching of `source` to `reference`. Source values
// are quantized into `bins` bins on [0,1]; each bin is mapped to the mean of
// the reference quantile function over the bin's CDF interval. The remap is
// monotone, lands in the reference's value range, and reproduces the
// reference's per-channel mean exactly (up to rounding) when both images
// have the same size. Output is clipped to [0,1].
ImageTensor HistogramMatch(const ImageTensor& source, const ImageTensor& reference,
                           int bins = 256);

}  // namespace reblur

#endif  // REBLUR_TTA_HISTOGRAM_H_
