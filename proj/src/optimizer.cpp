#include "gane/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "gane/errors.hpp"

namespace gane {

RmsProp::RmsProp(std::size_t rows, std::size_t cols, RmsPropConfig cfg)
    : cfg_(cfg), rows_(rows), cols_(cols), accum_(rows * cols, 0.0) {
  if (!(cfg.lr > 0.0) || !(cfg.decay > 0.0 && cfg.decay < 1.0) ||
      !(cfg.eps > 0.0))
    throw ContractError("invalid RMSProp configuration");
}

void RmsProp::step(EmbeddingMatrix& params, const SparseGrad& grad) {
  if (params.rows() != rows_ || params.cols() != cols_)
    throw ContractError("optimizer state shape does not match parameters");
  if (grad.dim() != cols_)
    throw ContractError("gradient dimension does not match parameters");
  if (!grad.all_finite())
    throw ContractError("update rejected: non-finite gradient");

  for (std::size_t s = 0; s < grad.size(); ++s) {
    const VertexId v = grad.vertex_at(s);
    const auto row = grad.row_at(s);
    double* a = accum_.data() + static_cast<std::size_t>(v) * cols_;
    double* p = params.row(v);
    for (std::size_t c = 0; c < cols_; ++c) {
      const double gval = row[c];
      a[c] = cfg_.decay * a[c] + (1.0 - cfg_.decay) * gval * gval;
      p[c] -= cfg_.lr * gval / std::sqrt(a[c] + cfg_.eps);
    }
  }
}

void RmsProp::save(std::ostream& out) const {
  const std::uint64_t r = rows_, c = cols_;
  out.write(reinterpret_cast<const char*>(&r), sizeof r);
  out.write(reinterpret_cast<const char*>(&c), sizeof c);
  out.write(reinterpret_cast<const char*>(&cfg_), sizeof cfg_);
  out.write(reinterpret_cast<const char*>(accum_.data()),
            static_cast<std::streamsize>(accum_.size() * sizeof(double)));
}

RmsProp RmsProp::load(std::istream& in) {
  std::uint64_t r = 0, c = 0;
  RmsProp opt;
  in.read(reinterpret_cast<char*>(&r), sizeof r);
  in.read(reinterpret_cast<char*>(&c), sizeof c);
  in.read(reinterpret_cast<char*>(&opt.cfg_), sizeof opt.cfg_);
  opt.rows_ = r;
  opt.cols_ = c;
  opt.accum_.resize(r * c);
  in.read(reinterpret_cast<char*>(opt.accum_.data()),
          static_cast<std::streamsize>(opt.accum_.size() * sizeof(double)));
  if (!in) throw ParseError("truncated optimizer state");
  return opt;
}

void clip_params(EmbeddingMatrix& params, double c) {
  if (!(c > 0.0)) throw ContractError("clip bound must be positive");
  for (auto& x : params.data()) x = std::clamp(x, -c, c);
}

}  // namespace gane
