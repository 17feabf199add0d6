#include "qcs/corner_model.hpp"

#include <algorithm>
#include <cmath>

namespace qcs {

bool corner_limit_admissible(std::span<const cpx> lift_samples, double tau, double margin) {
    if (lift_samples.size() < 2) throw InsufficientDataError("need at least two lift samples");
    auto q = [tau](cpx l) { return l.real() - tau * l.imag(); };
    double first = q(lift_samples.front());
    double last = q(lift_samples.back());
    double lowest = last;
    for (cpx l : lift_samples) lowest = std::min(lowest, q(l));
    return last < first - margin && last <= lowest + 1e-12 * (1.0 + std::abs(last));
}

CornerExponent corner_model_exponent(double lnK, int corner_index) {
    if (corner_index < 1 || corner_index > 4) throw DomainError("corner index must be 1..4");
    if (!(lnK >= 0.0)) throw DomainError("lnK must be non-negative");
    if (lnK == 0.0) return {1.0, std::nullopt, std::nullopt};
    double sign = (corner_index % 2 == 1) ? -1.0 : 1.0;
    cpx ratio = sign * lnK / cpx(0.0, 2.0 * pi);
    double log_c = (2.0 * pi) * (2.0 * pi) / lnK;
    return {1.0 / (1.0 + ratio), std::exp(log_c), log_c};
}

}  // namespace qcs
