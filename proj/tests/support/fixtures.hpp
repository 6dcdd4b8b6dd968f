#pragma once

#include "dualobs/model.hpp"
#include "dualobs/model_io.hpp"

#include <random>
#include <string>

namespace fixtures {

inline std::string model_path(const std::string& name) { return std::string(DUALOBS_MODELS_DIR) + "/" + name; }

inline dualobs::JointModel table1() { return dualobs::validate_model(dualobs::read_model_file(model_path("table1.json"))); }
inline dualobs::JointModel table2() { return dualobs::validate_model(dualobs::read_model_file(model_path("table2.json"))); }

// Strictly positive PMF with entries bounded away from zero.
inline dualobs::Pmf random_pmf(std::mt19937_64& gen, std::size_t k, double floor = 0.05)
{
    std::uniform_real_distribution<double> u(floor, 1.0);
    dualobs::Pmf p(k);
    double s = 0.0;
    for (double& v : p) s += (v = u(gen));
    for (double& v : p) v /= s;
    return p;
}

inline dualobs::JointModelSpec product_spec(const dualobs::Pmf& g0, const dualobs::Pmf& k0, const dualobs::Pmf& g1,
                                            const dualobs::Pmf& k1, double p0 = 0.4)
{
    dualobs::JointModelSpec s;
    s.s1_size = g0.size();
    s.s2_size = k0.size();
    s.p0 = p0;
    for (std::size_t y = 0; y < g0.size(); ++y) {
        for (std::size_t z = 0; z < k0.size(); ++z) {
            s.f0.push_back(g0[y] * k0[z]);
            s.f1.push_back(g1[y] * k1[z]);
        }
    }
    return s;
}

// Product model with |S1|, |S2| drawn from [2, max_size].
inline dualobs::JointModel random_product_model(std::mt19937_64& gen, std::size_t max_size = 4)
{
    std::uniform_int_distribution<std::size_t> size(2, max_size);
    const std::size_t a = size(gen);
    const std::size_t b = size(gen);
    const auto g0 = random_pmf(gen, a);
    const auto g1 = random_pmf(gen, a);
    const auto k0 = random_pmf(gen, b);
    const auto k1 = random_pmf(gen, b);
    return dualobs::validate_model(product_spec(g0, k0, g1, k1));
}

// Joint (generally non-product) model.
inline dualobs::JointModel random_joint_model(std::mt19937_64& gen, std::size_t a, std::size_t b)
{
    dualobs::JointModelSpec s;
    s.s1_size = a;
    s.s2_size = b;
    s.f0 = random_pmf(gen, a * b, 0.1);
    s.f1 = random_pmf(gen, a * b, 0.1);
    s.p0 = 0.45;
    return dualobs::validate_model(s);
}

}  // namespace fixtures
