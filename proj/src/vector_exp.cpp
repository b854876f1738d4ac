#include "vector_exp.hpp"

#include <cmath>

namespace vpos::detail {

void exp_in_place(double* p, std::size_t n)
{
    for (std::size_t i = 0; i < n; ++i)
        p[i] = std::exp(p[i]);
}

} // namespace vpos::detail
