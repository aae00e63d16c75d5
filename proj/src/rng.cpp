#include "engelgrad/rng.hpp"

#include <cmath>
#include <numbers>

namespace engelgrad {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream, std::uint64_t index) {
  return splitmix64(splitmix64(splitmix64(root) ^ stream) ^ index);
}

std::uint64_t Rng::next_u64() {
  state_ += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double Rng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

namespace {

double radical_inverse(std::uint64_t i, unsigned base) {
  double inv = 1.0 / base, f = inv, r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

}  // namespace

Point4 halton_point(std::uint64_t index, const Box& box, const Point4& shift) {
  static constexpr unsigned bases[4] = {2, 3, 5, 7};
  Point4 p;
  for (int k = 0; k < 4; ++k) {
    double u = radical_inverse(index + 1, bases[k]) + shift[k];
    u -= std::floor(u);
    p[k] = box.lower[k] + u * (box.upper[k] - box.lower[k]);
  }
  return p;
}

Point4 random_shift(std::uint64_t seed) {
  Rng rng(seed);
  Point4 s;
  for (int k = 0; k < 4; ++k) s[k] = rng.uniform();
  return s;
}

}  // namespace engelgrad
