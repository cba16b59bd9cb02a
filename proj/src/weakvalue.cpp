#include "cheshire/weakvalue.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "cheshire/basis.hpp"
#include "cheshire/errors.hpp"

namespace cheshire {

namespace catalog {

namespace {

using namespace basis;

constexpr std::array<std::string_view, 17> kIds{
    "Pi_L",   "Pi_R",   "sigma_z", "sigma_x", "sigma_z_L", "sigma_z_R", "sigma_x_L", "sigma_x_R", "L_x",
    "LxSx",   "LxSx_L", "LxSx_R",  "A_prime", "A_prime_1", "A_prime_2", "A_prime_3", "identity",
};

Operator lxsx() {
    return tensor(l_x(), sigma_x());
}

Operator in_arm(Arm a, const Operator &op) {
    return tensor(projector(a), op);
}

Operator local(std::string_view id, double gpt) {
    auto pol_id = Operator::identity(polarization());
    if (id == "Pi_L") return projector(Arm::left);
    if (id == "Pi_R") return projector(Arm::right);
    if (id == "sigma_z") return sigma_z();
    if (id == "sigma_x") return sigma_x();
    if (id == "sigma_z_L") return in_arm(Arm::left, sigma_z());
    if (id == "sigma_z_R") return in_arm(Arm::right, sigma_z());
    if (id == "sigma_x_L") return in_arm(Arm::left, sigma_x());
    if (id == "sigma_x_R") return in_arm(Arm::right, sigma_x());
    if (id == "L_x") return l_x();
    if (id == "LxSx") return lxsx();
    if (id == "LxSx_L") return in_arm(Arm::left, lxsx());
    if (id == "LxSx_R") return in_arm(Arm::right, lxsx());
    auto sz = tensor(Operator::identity(orbital()), sigma_z());
    if (id == "A_prime") return sz + tensor(l_x(), sigma_x() * sigma_z()) * (kI * gpt);
    if (id == "A_prime_1") return sz + tensor(l_x(), pol_id) * (kI * gpt);
    if (id == "A_prime_2") return sz + tensor(l_z_restricted(), pol_id) * (kI * gpt);
    if (id == "A_prime_3") return sz - lxsx();
    throw ValueError("unknown observable '" + std::string(id) + "'");
}

}  // namespace

std::span<const std::string_view> ids() {
    return kIds;
}

bool contains(std::string_view id) {
    for (auto k : kIds) {
        if (k == id) {
            return true;
        }
    }
    return false;
}

bool needs_gpt(std::string_view id) {
    return id == "A_prime" || id == "A_prime_1" || id == "A_prime_2";
}

SpaceSignature local_signature(std::string_view id) {
    if (id == "identity") {
        return {};
    }
    return local(id, 0.0).signature();
}

bool is_hermitian(std::string_view id) {
    return !needs_gpt(id) && contains(id);
}

Operator observable(std::string_view id, const SpaceSignature &sig, double gpt) {
    if (!contains(id)) {
        std::string valid;
        for (auto k : kIds) {
            valid += valid.empty() ? "" : ", ";
            valid += k;
        }
        throw ValueError("unknown observable '" + std::string(id) + "' (valid: " + valid + ")");
    }
    if (id == "identity") {
        return Operator::identity(sig);
    }
    Operator op = local(id, gpt);
    return extend(is_hermitian(id) ? Operator(op.signature(), op.matrix(), OperatorKind::hermitian) : op, sig);
}

}  // namespace catalog

WeakValueResult weak_value(const Ket &pre, const Ket &post, const Operator &A, double threshold) {
    if (!(pre.signature() == post.signature()) || !(A.signature() == pre.signature())) {
        throw SignatureError("weak value: signatures differ (pre " + pre.signature().to_string() + ", post " +
                             post.signature().to_string() + ", observable " + A.signature().to_string() + ")");
    }
    cplx overlap = inner(post, pre);
    double scale = pre.norm() * post.norm();
    double modulus = scale > 0.0 ? std::abs(overlap) / scale : 0.0;
    if (!(modulus > threshold)) {
        std::ostringstream msg;
        msg << "degenerate post-selection: |<post|pre>| = " << modulus;
        throw DegeneratePostselection(modulus, msg.str());
    }
    WeakValueResult r;
    r.value = inner(post, A * pre) / overlap;
    r.overlap = overlap;
    return r;
}

WeakValueResult weak_value(optics::StateId pre, optics::StateId post, std::string_view observable,
                           const optics::StateParams &params, double gpt) {
    Ket in = optics::prepare_state(pre, params);
    Ket out = optics::prepare_state(post, params);
    auto r = weak_value(in, out, catalog::observable(observable, in.signature(), gpt));
    r.observable = observable;
    r.pre = optics::to_string(pre);
    r.post = optics::to_string(post);
    r.params = params;
    return r;
}

std::vector<WeakValueResult> cheshire_quartet() {
    std::vector<WeakValueResult> out;
    for (auto id : {"Pi_L", "Pi_R", "sigma_z_L", "sigma_z_R"}) {
        out.push_back(weak_value(optics::StateId::cheshire_in, optics::StateId::cheshire_f, id));
    }
    return out;
}

std::vector<std::string_view> cheshire_table_columns() {
    return {"Pi_L", "Pi_R", "sigma_z_L", "sigma_z_R", "sigma_x_L", "sigma_x_R"};
}

std::vector<std::vector<WeakValueResult>> cheshire_table(std::span<const double> thetas) {
    std::vector<std::vector<WeakValueResult>> rows;
    for (double theta : thetas) {
        optics::StateParams p{theta, std::nullopt};
        auto &row = rows.emplace_back();
        for (auto id : cheshire_table_columns()) {
            row.push_back(weak_value(optics::StateId::amp_in, optics::StateId::amp_f, id, p));
        }
    }
    return rows;
}

EffectiveWeakValue noisy_effective_weak_value(NoisyVariant variant, double alpha, double gpt) {
    optics::StateParams p{std::nullopt, alpha};
    EffectiveWeakValue r;
    if (variant == NoisyVariant::spin_orbit) {
        r.direct = weak_value(optics::StateId::noisy_in, optics::StateId::noisy_f, "A_prime", p, gpt).value;
        r.paper = cplx(gpt, 1.0) * std::tan(alpha);
    } else {
        r.direct = weak_value(optics::StateId::noisy_in, optics::StateId::noisy_f, "A_prime_3", p).value;
        r.paper = cplx(1.0, std::tan(alpha));
    }
    return r;
}

std::vector<WeakValueResult> disembodiment_table(double theta, double alpha) {
    optics::StateParams p{theta, alpha};
    std::vector<WeakValueResult> out;
    for (auto id : {"sigma_z_L", "sigma_z_R", "LxSx_L", "LxSx_R"}) {
        out.push_back(weak_value(optics::StateId::disembody_in, optics::StateId::disembody_f, id, p));
    }
    return out;
}

}  // namespace cheshire
