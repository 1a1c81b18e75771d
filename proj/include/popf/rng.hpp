// Copyright 2026 The popf Authors
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

#ifndef POPF_RNG_HPP_
#define POPF_RNG_HPP_

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <numbers>

#include "popf/errors.hpp"

namespace popf {

/// splitmix64: seedable, splittable 64-bit generator with a documented,
/// platform-independent sequence. Substreams are derived by mixing a stream id
/// into the seed, so distinct streams never share state.
class RandomStream {
public:
    explicit RandomStream(uint64_t seed) : state_(seed) {}

    static uint64_t mix(uint64_t z) {
        z += 0x9E3779B97F4A7C15ull;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Independent substream i of a master seed.
    static RandomStream substream(uint64_t seed, uint64_t stream_id) {
        return RandomStream(mix(seed) ^ mix(0xA0761D6478BD642Full * (stream_id + 1)));
    }

    uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform double in (0, 1].
    double next_unit() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller; pairs are generated and the spare cached.
    double next_gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = next_unit();
        const double u2 = next_unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

private:
    uint64_t state_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// Draws zero-mean Gaussian vectors with a fixed covariance. The shaping
/// factor is the Cholesky root when the covariance is positive definite and a
/// clamped eigenvalue square root otherwise (PSD with zero modes).
class GaussianVectorSampler {
public:
    explicit GaussianVectorSampler(const Eigen::MatrixXd& cov) {
        Eigen::LLT<Eigen::MatrixXd> llt(cov);
        if (llt.info() == Eigen::Success) {
            root_ = llt.matrixL();
            return;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
        if (es.eigenvalues().minCoeff() < -1e-9) {
            throw ConfigError("GaussianVectorSampler: covariance not PSD");
        }
        root_ = es.eigenvectors() *
                es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
    }

    Eigen::VectorXd sample(RandomStream& rng) const {
        Eigen::VectorXd g(root_.cols());
        for (Eigen::Index i = 0; i < g.size(); ++i) g(i) = rng.next_gaussian();
        return root_ * g;
    }

private:
    Eigen::MatrixXd root_;
};

}  // namespace popf

#endif  // POPF_RNG_HPP_
