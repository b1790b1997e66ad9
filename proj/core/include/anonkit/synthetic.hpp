#pragma once

#include <cstdint>

#include "anonkit/dataset.hpp"

namespace anonkit::synth {

/// Census-style benchmark shape: 12 features (7 categorical), binary income
/// label whose signal lives mostly in education / marital status / occupation
/// plus capital gain and hours. label_noise flips the clean rule's label.
Schema adult_schema();
Dataset adult_like(std::size_t rows, std::uint64_t seed, double label_noise = 0.05);

/// Admission-style shape: 8 categorical features, 5 classes; the `social`
/// feature carries real signal so attribute inference has something to find.
Schema nursery_schema();
Dataset nursery_like(std::size_t rows, std::uint64_t seed, double label_noise = 0.05);

/// Two-feature toy whose label is exactly (x > 50); learnable to 100%.
Schema toy_schema();
Dataset separable_toy(std::size_t rows, std::uint64_t seed);

/// Random mixed-type dataset for property tests: numeric columns are uniform
/// draws over small integer grids, categorical columns have 2-6 categories,
/// labels are noisy functions of the first columns.
Dataset random_mixed(std::size_t rows, std::size_t numeric_features,
                     std::size_t categorical_features, int classes, std::uint64_t seed);

}  // namespace anonkit::synth
