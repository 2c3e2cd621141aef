#include "seqcv/numeric.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace seqcv {

double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol) {
    if (!(b > a)) return 0.0;
    double error = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 20, rel_tol,
                                                                          &error);
}

}  // namespace seqcv
