#include "combpso/schedule.hpp"

#include <cmath>
#include <stdexcept>

namespace combpso {

bool check_convergence_constraint(double omega, double c1, double c2) {
    const double mean = (c1 + c2) / 2.0;
    return omega <= 1.0 && mean > 0.0 && mean < 2.0 * (1.0 + omega);
}

StepCoefficients coefficients_at(int t, const ScheduleParams& p) {
    p.validate();
    if (t < 0 || t > p.T)
        throw std::out_of_range(
            strfmt("coefficients_at: t=%d outside [0,%d]", t, p.T));
    // s(0) = 1 by continuity; pow(0, b) = 0 for b > 0
    const double ratio = static_cast<double>(t) / (p.a * static_cast<double>(p.T));
    const double s = t == 0 ? 1.0 : 1.0 / (1.0 + std::pow(ratio, p.b_shape));
    return StepCoefficients{
        p.omega_min + (p.omega_max - p.omega_min) * s,
        p.c_min + (p.c_max - p.c_min) * s,
        p.c_max + (p.c_min - p.c_max) * s,
    };
}

}  // namespace combpso
