#include "mclab/gallery.hpp"

#include <cmath>

#include "mclab/simulate.hpp"

namespace mclab {

using Eigen::MatrixXd;
using Eigen::VectorXd;

ChainModel gallery_iid(int size) {
  if (size < 2) throw Error("iid gallery chain needs at least 2 states");
  VectorXd pi(size);
  for (int x = 0; x < size; ++x) pi(x) = x + 1.0;
  pi /= pi.sum();
  MatrixXd kernel(size, size);
  for (int x = 0; x < size; ++x) kernel.row(x) = pi.transpose();
  VectorXd f(size);
  for (int x = 0; x < size; ++x) f(x) = x;
  return build_chain(kernel, f, pi);
}

ChainModel gallery_two_state(double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error("two-state flip probability must lie in (0,1)");
  MatrixXd kernel(2, 2);
  kernel << 1.0 - p, p, p, 1.0 - p;
  VectorXd f(2);
  f << 1.0, -1.0;
  return build_chain(kernel, f);
}

ChainModel gallery_cycle_walk(int size, double p) {
  if (size < 2) throw Error("cycle walk needs at least 2 states");
  if (!(p > 0.0 && p < 1.0)) throw Error("cycle walk step probability must lie in (0,1)");
  MatrixXd kernel = MatrixXd::Zero(size, size);
  for (int x = 0; x < size; ++x) {
    kernel(x, (x + 1) % size) += p;
    kernel(x, (x + size - 1) % size) += 1.0 - p;
  }
  VectorXd f(size);
  for (int x = 0; x < size; ++x) f(x) = std::sqrt(2.0) * std::cos(2.0 * M_PI * x / size);
  return build_chain(kernel, f);
}

ChainModel gallery_birth_death(int size) {
  if (size < 2) throw Error("birth-death chain needs at least 2 states");
  const double up = 0.3, down = 0.2;
  MatrixXd kernel = MatrixXd::Zero(size, size);
  for (int x = 0; x < size; ++x) {
    double stay = 1.0;
    if (x + 1 < size) {
      kernel(x, x + 1) = up;
      stay -= up;
    }
    if (x > 0) {
      kernel(x, x - 1) = down;
      stay -= down;
    }
    kernel(x, x) = stay;
  }
  VectorXd f(size);
  for (int x = 0; x < size; ++x) f(x) = x;
  return build_chain(kernel, f);
}

ChainModel gallery_random_dense(int size, std::uint64_t seed) {
  if (size < 2) throw Error("random dense chain needs at least 2 states");
  SplitMix64 rng{derive_stream(seed, 0xDE15Eull)};
  MatrixXd kernel(size, size);
  for (int x = 0; x < size; ++x) {
    double row_sum = 0.0;
    for (int y = 0; y < size; ++y) {
      kernel(x, y) = 0.1 + rng.next_unit();
      row_sum += kernel(x, y);
    }
    for (int y = 0; y < size; ++y) kernel(x, y) /= row_sum;
  }
  VectorXd f(size);
  for (int x = 0; x < size; ++x) f(x) = 2.0 * rng.next_unit() - 1.0;
  return build_chain(kernel, f);
}

ChainModel two_cycle() {
  MatrixXd kernel(2, 2);
  kernel << 0.0, 1.0, 1.0, 0.0;
  VectorXd f(2);
  f << 1.0, -1.0;
  return build_chain(kernel, f);
}

std::vector<GalleryEntry> default_gallery() {
  std::vector<GalleryEntry> out;
  out.push_back({"iid", gallery_iid()});
  out.push_back({"two-state", gallery_two_state()});
  out.push_back({"cycle-walk", gallery_cycle_walk()});
  out.push_back({"birth-death", gallery_birth_death()});
  out.push_back({"random-dense", gallery_random_dense()});
  return out;
}

ChainModel make_gallery_chain(const std::string& name, int size, double p, std::uint64_t seed) {
  // size <= 0 or p <= 0 select the per-name defaults.
  if (name == "iid") return gallery_iid(size > 0 ? size : 3);
  if (name == "two-state") return gallery_two_state(p > 0 ? p : 0.3);
  if (name == "cycle-walk") return gallery_cycle_walk(size > 0 ? size : 5, p > 0 ? p : 0.8);
  if (name == "birth-death") return gallery_birth_death(size > 0 ? size : 4);
  if (name == "random-dense") return gallery_random_dense(size > 0 ? size : 6, seed);
  throw Error("unknown gallery chain '" + name +
              "' (expected iid, two-state, cycle-walk, birth-death, random-dense)");
}

}  // namespace mclab
