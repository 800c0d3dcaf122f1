#pragma once

// Degree distributions of an LDPC ensemble, edge perspective.

#include <cmath>
#include <stdexcept>
#include <vector>

namespace satde {

struct EnsembleSpec {
    // lambda_coeffs[i] is the coefficient of x^i, i.e. the fraction of edges
    // attached to variable nodes of degree i+1 (edge perspective); same for rho.
    std::vector<double> lambda_coeffs;
    std::vector<double> rho_coeffs;

    static EnsembleSpec regular(int l, int r) {
        if (l < 2 || r < 2) throw std::invalid_argument("regular ensemble needs l,r >= 2");
        EnsembleSpec e;
        e.lambda_coeffs.assign(l, 0.0);
        e.lambda_coeffs[l - 1] = 1.0;
        e.rho_coeffs.assign(r, 0.0);
        e.rho_coeffs[r - 1] = 1.0;
        return e;
    }

    static EnsembleSpec from_coeffs(std::vector<double> lambda, std::vector<double> rho) {
        EnsembleSpec e;
        e.lambda_coeffs = std::move(lambda);
        e.rho_coeffs = std::move(rho);
        e.validate();
        return e;
    }

    // Node-perspective degree fractions converted to edge perspective.
    static EnsembleSpec from_node_perspective(const std::vector<double>& var_frac,
                                              const std::vector<double>& chk_frac) {
        auto convert = [](const std::vector<double>& f) {
            std::vector<double> edge(f.size(), 0.0);
            double norm = 0.0;
            for (size_t i = 0; i < f.size(); ++i) norm += f[i] * (i + 1);
            for (size_t i = 0; i < f.size(); ++i) edge[i] = f[i] * (i + 1) / norm;
            return edge;
        };
        return from_coeffs(convert(var_frac), convert(chk_frac));
    }

    void validate() const {
        auto check = [](const std::vector<double>& c, const char* name) {
            if (c.size() < 2) throw std::invalid_argument(std::string(name) + " too short");
            if (c[0] != 0.0) throw std::invalid_argument(std::string(name) + "1 must be 0");
            double s = 0.0;
            for (double v : c) {
                if (v < 0.0) throw std::invalid_argument(std::string(name) + " coefficient < 0");
                s += v;
            }
            if (std::abs(s - 1.0) > 1e-9)
                throw std::invalid_argument(std::string(name) + " must sum to 1");
        };
        check(lambda_coeffs, "lambda");
        check(rho_coeffs, "rho");
    }

    int min_var_degree() const {
        for (size_t i = 0; i < lambda_coeffs.size(); ++i)
            if (lambda_coeffs[i] > 0.0) return (int)i + 1;
        return 0;
    }
    int max_var_degree() const {
        for (size_t i = lambda_coeffs.size(); i-- > 0;)
            if (lambda_coeffs[i] > 0.0) return (int)i + 1;
        return 0;
    }
    int max_chk_degree() const {
        for (size_t i = rho_coeffs.size(); i-- > 0;)
            if (rho_coeffs[i] > 0.0) return (int)i + 1;
        return 0;
    }
    double lambda2() const { return lambda_coeffs.size() > 1 ? lambda_coeffs[1] : 0.0; }
    double lambda3() const { return lambda_coeffs.size() > 2 ? lambda_coeffs[2] : 0.0; }

    double rho_prime_1() const {
        double s = 0.0;
        for (size_t i = 1; i < rho_coeffs.size(); ++i) s += rho_coeffs[i] * (double)i;
        return s;
    }

    bool is_regular() const {
        return min_var_degree() == max_var_degree() &&
               max_chk_degree() ==
                   [this] {
                       for (size_t i = 0; i < rho_coeffs.size(); ++i)
                           if (rho_coeffs[i] > 0.0) return (int)i + 1;
                       return 0;
                   }();
    }

    // lambda(x), rho(x)
    double lambda_eval(double x) const {
        double s = 0.0, p = 1.0;
        for (double cfs : lambda_coeffs) {
            s += cfs * p;
            p *= x;
        }
        return s;
    }
    double rho_eval(double x) const {
        double s = 0.0, p = 1.0;
        for (double cfs : rho_coeffs) {
            s += cfs * p;
            p *= x;
        }
        return s;
    }
};

}  // namespace satde
