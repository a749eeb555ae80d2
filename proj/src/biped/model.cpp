#include "slipstep/biped/model.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace slipstep::biped {

namespace {

void require_positive(double v, const char* field) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument(std::string("model: ") + field +
                                    " must be positive and finite");
    }
}

void check_link(const LinkParams& l, const char* name) {
    require_positive(l.mass, name);
    require_positive(l.length, name);
    require_positive(l.com, name);
    require_positive(l.inertia, name);
    if (l.com > l.length) {
        throw std::invalid_argument(std::string("model: ") + name +
                                    " CoM lies beyond the link length");
    }
}

std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(unsigned(s[a]))) ++a;
    while (b > a && std::isspace(unsigned(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

} // namespace

void validate_model(const BipedModel& m) {
    require_positive(m.g, "g");
    require_positive(m.ankle_height, "ankle_height");
    require_positive(m.sole_fore, "sole_fore");
    require_positive(m.sole_aft, "sole_aft");
    check_link(m.shank, "shank");
    check_link(m.thigh, "thigh");
    check_link(m.torso, "torso");
    require_positive(m.foot_mass, "foot_mass");
    require_positive(m.foot_com_drop, "foot_com_drop");
    require_positive(m.foot_inertia, "foot_inertia");
    if (m.foot_com_drop > m.ankle_height) {
        throw std::invalid_argument("model: foot CoM below the sole plane");
    }
}

BipedModel parse_model(std::istream& in) {
    std::map<std::string, double> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("model: line " + std::to_string(lineno) +
                                        " is not 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (kv.count(key)) {
            throw std::invalid_argument("model: duplicate key '" + key + "'");
        }
        try {
            size_t pos = 0;
            const double d = std::stod(value, &pos);
            if (pos != value.size()) throw std::invalid_argument("");
            kv[key] = d;
        } catch (const std::invalid_argument&) {
            throw std::invalid_argument("model: bad numeric value '" + value +
                                        "' for " + key);
        }
    }

    BipedModel m;
    auto take = [&](const char* key) {
        const auto it = kv.find(key);
        if (it == kv.end()) {
            throw std::invalid_argument(std::string("model: missing key '") + key + "'");
        }
        const double v = it->second;
        kv.erase(it);
        return v;
    };
    m.g = take("g");
    m.ankle_height = take("ankle_height");
    m.sole_fore = take("sole_fore");
    m.sole_aft = take("sole_aft");
    auto take_link = [&](const char* name) {
        LinkParams l;
        l.mass = take((std::string(name) + "_mass").c_str());
        l.length = take((std::string(name) + "_length").c_str());
        l.com = take((std::string(name) + "_com").c_str());
        l.inertia = take((std::string(name) + "_inertia").c_str());
        return l;
    };
    m.shank = take_link("shank");
    m.thigh = take_link("thigh");
    m.torso = take_link("torso");
    m.foot_mass = take("foot_mass");
    m.foot_com_drop = take("foot_com_drop");
    m.foot_inertia = take("foot_inertia");
    if (!kv.empty()) {
        throw std::invalid_argument("model: unknown key '" + kv.begin()->first + "'");
    }
    validate_model(m);
    return m;
}

BipedModel load_model(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("model: cannot open '" + path + "'");
    return parse_model(f);
}

BipedModel reference_model() {
    BipedModel m;
    m.g = 9.8;
    m.ankle_height = 0.045;
    m.sole_fore = 0.02;
    m.sole_aft = 0.02;
    m.shank = {0.35, 0.1, 0.05, 2.92e-4};
    m.thigh = {0.45, 0.1, 0.05, 3.75e-4};
    m.torso = {2.9, 0.2, 0.1, 9.67e-3};
    m.foot_mass = 0.25;
    m.foot_com_drop = 0.025;
    m.foot_inertia = 3.3e-5;
    return m;
}

} // namespace slipstep::biped
