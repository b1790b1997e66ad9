#pragma once

#include <string>
#include <vector>

#include "anonkit/dataset.hpp"

namespace anonkit {

/// Median Mondrian baseline: recursive strict partitioning that splits the
/// QI feature with the widest normalized range at its median. Numeric widths
/// are (partition range / global range); categorical widths are
/// (distinct-in-partition / distinct-global). Categoricals are ordered by
/// frequency and cut at the median mass. When the widest feature cannot be
/// split with both sides >= k, the next-widest is tried; a partition with no
/// admissible cut is final. Partitions recode to concrete values: numeric ->
/// range midpoint, categorical -> modal category (ties -> lowest index), so
/// the output trains through the same learner path as the guided method.
Dataset mondrian_anonymize(const Dataset& train, const std::vector<std::string>& qi, int k);

}  // namespace anonkit
