#include "qmem/units.hpp"

#include <limits>

namespace qmem {

double coherence_time_us(double gamma_khz)
{
    if (gamma_khz <= 0.0)
        return std::numeric_limits<double>::infinity();
    return 1.0 / to_decay_constant(gamma_khz);
}

}  // namespace qmem
