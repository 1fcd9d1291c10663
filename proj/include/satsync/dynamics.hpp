#pragma once

#include "satsync/linalg.hpp"

namespace satsync {

// Standard (unit-level) saturation, applied componentwise.
double saturate(double w);
Vector saturate(const Vector& w);

// One step of the saturated double-integrator plant. The state stacks
// position on top of velocity, each of dimension u.size():
//   p' = p + v,  v' = v + saturate(u)
Vector agent_step(const Vector& x, const Vector& u);

// The reference generator is the same plant with zero input.
Vector exo_step(const Vector& x);

// Measured output: the position block.
Vector output(const Vector& x);

// Plant matrices for state dimension 2n: A = [[I, I], [0, I]], B = [0; I].
Matrix plant_a(int n);
Matrix plant_b(int n);

}  // namespace satsync
