#pragma once

#include <cstddef>

namespace vpos::detail {

/// p[i] = exp(p[i]) for finite inputs. Built so the loop can use the
/// platform's vector math routines; results may differ from std::exp in the
/// last bit but are deterministic for a given build and machine.
void exp_in_place(double* p, std::size_t n);

} // namespace vpos::detail
