// Copyright 2026 The privtext Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <Eigen/Dense>
#include <cmath>
#include <new>
#include <stdexcept>
#include <type_traits>

#include "privtext/model_internal.h"

namespace privtext::internal {

namespace {

using RowMat =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Eigen::Index;
using Eigen::VectorXd;

constexpr double kLnEps = 1e-8;

// Walks the flat parameter layout; see ModelConfig docs for block order.
template <typename Ptr>
struct Cursor {
  Ptr p;

  auto mat(Index rows, Index cols) {
    auto m = Eigen::Map<std::conditional_t<std::is_const_v<
                            std::remove_pointer_t<Ptr>>,
                        const RowMat, RowMat>>(p, rows, cols);
    p += rows * cols;
    return m;
  }
  auto vec(Index n) {
    auto v = Eigen::Map<std::conditional_t<std::is_const_v<
                            std::remove_pointer_t<Ptr>>,
                        const VectorXd, VectorXd>>(p, n);
    p += n;
    return v;
  }
};

template <typename Ptr>
struct Blocks {
  using MatMap = decltype(Cursor<Ptr>{nullptr}.mat(0, 0));
  using VecMap = decltype(Cursor<Ptr>{nullptr}.vec(0));

  MatMap embed{nullptr, 0, 0}, wq{nullptr, 0, 0}, wk{nullptr, 0, 0},
      wv{nullptr, 0, 0}, wo{nullptr, 0, 0}, w1{nullptr, 0, 0},
      w2{nullptr, 0, 0}, w_head{nullptr, 0, 0};
  VecMap bq{nullptr, 0}, bk{nullptr, 0}, bv{nullptr, 0}, bo{nullptr, 0},
      ln1_g{nullptr, 0}, ln1_b{nullptr, 0}, b1{nullptr, 0}, b2{nullptr, 0},
      ln2_g{nullptr, 0}, ln2_b{nullptr, 0}, b_head{nullptr, 0};

  // Maps rebind via placement new (the Eigen-documented idiom); plain
  // assignment would copy coefficients instead.
  explicit Blocks(Ptr base, const ModelConfig& c) {
    Cursor<Ptr> cur{base};
    const Index v = c.vocab_hash_dim, e = c.embed_dim, f = c.ff_dim;
    new (&embed) MatMap(cur.mat(v, e));
    new (&wq) MatMap(cur.mat(e, e));
    new (&bq) VecMap(cur.vec(e));
    new (&wk) MatMap(cur.mat(e, e));
    new (&bk) VecMap(cur.vec(e));
    new (&wv) MatMap(cur.mat(e, e));
    new (&bv) VecMap(cur.vec(e));
    new (&wo) MatMap(cur.mat(e, e));
    new (&bo) VecMap(cur.vec(e));
    new (&ln1_g) VecMap(cur.vec(e));
    new (&ln1_b) VecMap(cur.vec(e));
    new (&w1) MatMap(cur.mat(e, f));
    new (&b1) VecMap(cur.vec(f));
    new (&w2) MatMap(cur.mat(f, e));
    new (&b2) VecMap(cur.vec(e));
    new (&ln2_g) VecMap(cur.vec(e));
    new (&ln2_b) VecMap(cur.vec(e));
    new (&w_head) MatMap(cur.mat(e, 3));
    new (&b_head) VecMap(cur.vec(3));
  }
};

RowMat positional_encoding(Index len, Index e) {
  RowMat pos(len, e);
  for (Index t = 0; t < len; ++t) {
    for (Index j = 0; j < e; ++j) {
      const Index pair = j / 2;
      const double angle =
          static_cast<double>(t) /
          std::pow(10000.0, 2.0 * static_cast<double>(pair) /
                                static_cast<double>(e));
      pos(t, j) = (j % 2 == 0) ? std::sin(angle) : std::cos(angle);
    }
  }
  return pos;
}

void softmax_rows(RowMat& m) {
  for (Index r = 0; r < m.rows(); ++r) {
    const double mx = m.row(r).maxCoeff();
    m.row(r) = (m.row(r).array() - mx).exp();
    m.row(r) /= m.row(r).sum();
  }
}

struct LnForward {
  RowMat xhat;   // normalized, pre-affine
  VectorXd inv;  // 1 / sqrt(var + eps) per row
  RowMat z;      // gamma * xhat + beta
};

template <typename GammaVec, typename BetaVec>
LnForward layer_norm_forward(const RowMat& y, const GammaVec& gamma,
                             const BetaVec& beta) {
  const Index len = y.rows(), e = y.cols();
  LnForward out{RowMat(len, e), VectorXd(len), RowMat(len, e)};
  for (Index t = 0; t < len; ++t) {
    const double mu = y.row(t).mean();
    const double var = (y.row(t).array() - mu).square().mean();
    const double iv = 1.0 / std::sqrt(var + kLnEps);
    out.inv(t) = iv;
    out.xhat.row(t) = (y.row(t).array() - mu) * iv;
    out.z.row(t) = out.xhat.row(t).array() * gamma.transpose().array() +
                   beta.transpose().array();
  }
  return out;
}

template <typename GammaVec, typename DGammaVec, typename DBetaVec>
RowMat layer_norm_backward(const RowMat& dz, const LnForward& fwd,
                           const GammaVec& gamma, DGammaVec& dgamma,
                           DBetaVec& dbeta) {
  const Index len = dz.rows(), e = dz.cols();
  RowMat dy(len, e);
  for (Index t = 0; t < len; ++t) {
    dgamma += (dz.row(t).array() * fwd.xhat.row(t).array())
                  .matrix()
                  .transpose();
    dbeta += dz.row(t).transpose();
    const Eigen::ArrayXd dxhat =
        dz.row(t).transpose().array() * gamma.array();
    const double m1 = dxhat.mean();
    const double m2 = (dxhat * fwd.xhat.row(t).transpose().array()).mean();
    dy.row(t) = (fwd.inv(t) *
                 (dxhat - m1 - fwd.xhat.row(t).transpose().array() * m2))
                    .matrix()
                    .transpose();
  }
  return dy;
}

// Everything the backward pass needs from the forward pass.
struct ForwardState {
  Index len = 0;
  std::vector<std::uint32_t> tokens;
  RowMat x0, q, k, v, o, y1, pre1, u, y2;
  std::vector<RowMat> attn;  // per head, len x len
  LnForward ln1, ln2;
  VectorXd pooled;
  std::array<double, kNumClasses> probs{};
};

ForwardState run_forward(const Blocks<const double*>& w,
                         const LabeledExample& example,
                         const ModelConfig& c, TransformerTrace* trace) {
  if (example.token_ids.empty()) {
    throw std::invalid_argument("example has no tokens");
  }
  ForwardState s;
  const Index e = c.embed_dim;
  const Index heads = c.num_heads, dh = e / heads;

  s.tokens.assign(
      example.token_ids.begin(),
      example.token_ids.begin() +
          std::min<std::size_t>(example.token_ids.size(), c.max_tokens));
  s.len = static_cast<Index>(s.tokens.size());
  for (std::uint32_t id : s.tokens) {
    if (id >= c.vocab_hash_dim) {
      throw std::invalid_argument("token id out of vocabulary range");
    }
  }

  s.x0 = positional_encoding(s.len, e);
  for (Index t = 0; t < s.len; ++t) s.x0.row(t) += w.embed.row(s.tokens[t]);

  s.q = s.x0 * w.wq;
  s.q.rowwise() += w.bq.transpose();
  s.k = s.x0 * w.wk;
  s.k.rowwise() += w.bk.transpose();
  s.v = s.x0 * w.wv;
  s.v.rowwise() += w.bv.transpose();

  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  s.o.resize(s.len, e);
  s.attn.reserve(heads);
  for (Index h = 0; h < heads; ++h) {
    RowMat scores = s.q.middleCols(h * dh, dh) *
                    s.k.middleCols(h * dh, dh).transpose() * scale;
    softmax_rows(scores);
    s.o.middleCols(h * dh, dh) = scores * s.v.middleCols(h * dh, dh);
    s.attn.push_back(std::move(scores));
  }

  s.y1 = s.x0 + s.o * w.wo;
  s.y1.rowwise() += w.bo.transpose();
  s.ln1 = layer_norm_forward(s.y1, w.ln1_g, w.ln1_b);

  s.pre1 = s.ln1.z * w.w1;
  s.pre1.rowwise() += w.b1.transpose();
  s.u = s.pre1.cwiseMax(0.0);

  s.y2 = s.ln1.z + s.u * w.w2;
  s.y2.rowwise() += w.b2.transpose();
  s.ln2 = layer_norm_forward(s.y2, w.ln2_g, w.ln2_b);

  s.pooled = s.ln2.z.colwise().mean().transpose();

  std::array<double, kNumClasses> logits;
  for (int cls = 0; cls < kNumClasses; ++cls) {
    logits[cls] = s.pooled.dot(w.w_head.col(cls)) + w.b_head(cls);
  }
  s.probs = softmax3(logits);

  if (trace != nullptr) {
    trace->seq_len = static_cast<std::uint32_t>(s.len);
    trace->attention.clear();
    for (const RowMat& a : s.attn) {
      trace->attention.emplace_back(a.data(), a.data() + a.size());
    }
    trace->ln1_hat.assign(s.ln1.xhat.data(),
                          s.ln1.xhat.data() + s.ln1.xhat.size());
    trace->ln2_hat.assign(s.ln2.xhat.data(),
                          s.ln2.xhat.data() + s.ln2.xhat.size());
  }
  return s;
}

}  // namespace

std::array<double, kNumClasses> transformer_forward(
    const ParamVector& params, const LabeledExample& example,
    const ModelConfig& config, TransformerTrace* trace) {
  const Blocks<const double*> w(params.data(), config);
  return run_forward(w, example, config, trace).probs;
}

double transformer_backward(const ParamVector& params,
                            const LabeledExample& example,
                            const ModelConfig& config, double* grad_out) {
  const Blocks<const double*> w(params.data(), config);
  Blocks<double*> g(grad_out, config);
  const ForwardState s = run_forward(w, example, config, nullptr);

  const Index e = config.embed_dim;
  const Index heads = config.num_heads, dh = e / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  const int y = static_cast<int>(example.label);
  const double loss = -std::log(s.probs[y]);

  VectorXd dlogits(3);
  for (int cls = 0; cls < kNumClasses; ++cls) {
    dlogits(cls) = s.probs[cls] - (cls == y ? 1.0 : 0.0);
  }

  g.w_head += s.pooled * dlogits.transpose();
  g.b_head += dlogits;
  const VectorXd dpooled = w.w_head * dlogits;

  // Mean pool spreads the gradient evenly over positions.
  RowMat dz2(s.len, e);
  for (Index t = 0; t < s.len; ++t) {
    dz2.row(t) = dpooled.transpose() / static_cast<double>(s.len);
  }

  const RowMat dy2 = layer_norm_backward(dz2, s.ln2, w.ln2_g, g.ln2_g,
                                         g.ln2_b);

  RowMat dz1 = dy2;  // residual branch
  g.b2 += dy2.colwise().sum().transpose();
  g.w2 += s.u.transpose() * dy2;
  RowMat du = dy2 * w.w2.transpose();
  const RowMat dpre1 =
      (s.pre1.array() > 0.0).select(du, RowMat::Zero(s.len, config.ff_dim));
  g.b1 += dpre1.colwise().sum().transpose();
  g.w1 += s.ln1.z.transpose() * dpre1;
  dz1 += dpre1 * w.w1.transpose();

  const RowMat dy1 = layer_norm_backward(dz1, s.ln1, w.ln1_g, g.ln1_g,
                                         g.ln1_b);

  RowMat dx0 = dy1;  // residual branch
  const RowMat dattn = dy1;
  g.bo += dattn.colwise().sum().transpose();
  g.wo += s.o.transpose() * dattn;
  const RowMat do_ = dattn * w.wo.transpose();

  RowMat dq(s.len, e), dk(s.len, e), dv(s.len, e);
  for (Index h = 0; h < heads; ++h) {
    const auto qh = s.q.middleCols(h * dh, dh);
    const auto kh = s.k.middleCols(h * dh, dh);
    const auto vh = s.v.middleCols(h * dh, dh);
    const RowMat& ah = s.attn[h];
    const auto doh = do_.middleCols(h * dh, dh);

    const RowMat da = doh * vh.transpose();
    dv.middleCols(h * dh, dh) = ah.transpose() * doh;

    RowMat ds(s.len, s.len);
    for (Index r = 0; r < s.len; ++r) {
      const double dot = da.row(r).dot(ah.row(r));
      ds.row(r) = ah.row(r).array() * (da.row(r).array() - dot);
    }
    ds *= scale;
    dq.middleCols(h * dh, dh) = ds * kh;
    dk.middleCols(h * dh, dh) = ds.transpose() * qh;
  }

  g.bq += dq.colwise().sum().transpose();
  g.wq += s.x0.transpose() * dq;
  dx0 += dq * w.wq.transpose();
  g.bk += dk.colwise().sum().transpose();
  g.wk += s.x0.transpose() * dk;
  dx0 += dk * w.wk.transpose();
  g.bv += dv.colwise().sum().transpose();
  g.wv += s.x0.transpose() * dv;
  dx0 += dv * w.wv.transpose();

  for (Index t = 0; t < s.len; ++t) {
    g.embed.row(s.tokens[t]) += dx0.row(t);
  }
  return loss;
}

}  // namespace privtext::internal
