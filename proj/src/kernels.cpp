#include "mvksc/kernels.hpp"

#include <cmath>
#include <cstdio>

namespace mvksc {

void KernelSpec::validate() const {
    if (family == KernelFamily::Polynomial) {
        if (d < 1) throw config_error("polynomial kernel needs degree d >= 1");
        if (c < 0.0) throw config_error("polynomial kernel needs offset c >= 0");
        if (!std::isfinite(c)) throw config_error("polynomial kernel offset must be finite");
    }
}

std::string KernelSpec::to_string() const {
    if (family == KernelFamily::Linear) return "linear";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "poly:%.17g:%d", c, d);
    return buf;
}

KernelSpec parse_kernel_spec(const std::string& text) {
    if (text == "linear") return KernelSpec::linear();
    if (text.rfind("poly:", 0) == 0) {
        std::size_t sep = text.find(':', 5);
        if (sep != std::string::npos) {
            try {
                double c = std::stod(text.substr(5, sep - 5));
                int d = std::stoi(text.substr(sep + 1));
                KernelSpec spec = KernelSpec::polynomial(c, d);
                spec.validate();
                return spec;
            } catch (const config_error&) {
                throw;
            } catch (const std::exception&) {
                // fall through to the shared diagnostic
            }
        }
    }
    throw config_error("unrecognized kernel '" + text + "' (expected linear or poly:<c>:<d>)");
}

namespace {

double int_pow(double base, int exponent) {
    double out = 1.0;
    for (int i = 0; i < exponent; ++i) out *= base;
    return out;
}

}  // namespace

Matrix gram(const Matrix& view, const KernelSpec& spec) {
    spec.validate();
    if (view.rows() == 0 || view.cols() == 0) throw data_error("gram: empty view matrix");
    if (view.cols() < 2) throw data_error("gram: need at least 2 samples");
    if (!all_finite(view)) throw data_error("gram: non-finite entries in view matrix");

    Matrix k = view.transpose() * view;
    if (spec.family == KernelFamily::Polynomial) {
        k = k.unaryExpr([&](double v) { return int_pow(v + spec.c, spec.d); });
    }
    k = ((k + k.transpose()) * 0.5).eval();
    return k;
}

}  // namespace mvksc
