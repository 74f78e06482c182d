#pragma once

#include "robustpr/signal.hpp"

namespace robustpr {

/// min_theta ||x_hat - e^{i theta} x_true|| / ||x_true||.
/// Complex: the optimal phase is conj(c)/|c| with c = <x_hat, x_true>
/// (any phase when c = 0). Real: theta in {0, pi}.
double relative_error(const Signal& x_hat, const Signal& x_true);

/// x_hat rotated by the optimal global phase (sign, for real signals) so it
/// lines up with x_true.
Signal align_phase(const Signal& x_hat, const Signal& x_true);

}  // namespace robustpr
