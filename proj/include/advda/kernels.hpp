#pragma once

#include <span>
#include <vector>

#include "advda/adversarial.hpp"
#include "advda/core_model.hpp"
#include "advda/matrix.hpp"

namespace advda::kernels {

// Plain loops, kept as the reference the parallel kernels are tested against.
namespace serial {

std::vector<double> score_rows(const ModelParams& params, const Matrix& X);
Matrix bank_scores(const HeadBank& bank, const Matrix& X);
double nll_sum(const ModelParams& params, const Matrix& X, std::span<const double> y);
Matrix augment_rows(const ModelParams& params, const Matrix& X, std::span<const double> y, const AdvConfig& cfg);

}  // namespace serial

// OpenMP versions. Rowwise kernels are bitwise identical to serial. nll_sum
// reduces fixed-size row blocks in order, so its result does not depend on
// the thread count (but may differ from serial in the last bits).
namespace omp {

inline constexpr std::size_t kReduceBlock = 256;

std::vector<double> score_rows(const ModelParams& params, const Matrix& X);
Matrix bank_scores(const HeadBank& bank, const Matrix& X);
double nll_sum(const ModelParams& params, const Matrix& X, std::span<const double> y);
Matrix augment_rows(const ModelParams& params, const Matrix& X, std::span<const double> y, const AdvConfig& cfg);

}  // namespace omp

int max_threads();
void set_threads(int n);

}  // namespace advda::kernels
