#include "jointloss/loss/no_default.hpp"

#include <cmath>

#include "jointloss/errors.hpp"
#include "jointloss/model/moments.hpp"

namespace jointloss {

double no_default_probability(int k_obligors, double face, const MarketParams& params,
                              const quadrature::QuadratureSpec& quad) {
    if (k_obligors < 1) throw DomainError("no_default_probability: K must be >= 1");
    if (!(face > 0.0)) throw DomainError("no_default_probability: face must be positive");
    params.validate();
    const double k = k_obligors;
    auto survive = [&](double z, double u) {
        const double m0 = moment_plain(0, z, u, face, params);
        return std::exp(k * std::log1p(-m0));
    };
    return quadrature::integrate_chi2(
        [&](double z) {
            return quadrature::integrate_gauss([&](double u) { return survive(z, u); },
                                               params.n_fluct, quad);
        },
        params.n_fluct, quad);
}

}  // namespace jointloss
