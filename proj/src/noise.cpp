#include "qsurr/noise.hpp"

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace qsurr {

bool PauliNoiseSpec::is_zero() const {
    return p_x == 0 && p_y == 0 && p_z == 0 && p_c == 0 && clifford_channel.empty();
}

void PauliNoiseSpec::validate() const {
    auto in01 = [](double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; };
    if (!in01(p_x) || !in01(p_y) || !in01(p_z) || !in01(p_c) || !in01(p_e))
        throw std::invalid_argument("noise probabilities must lie in [0, 1]");
    if (p_x + p_y + p_z > 1.0 + 1e-12)
        throw std::invalid_argument("p_x + p_y + p_z exceeds 1");
    for (double q : {q_x(), q_y(), q_z()})
        if (q < -1.0 - 1e-12 || q > 1.0 + 1e-12)
            throw std::invalid_argument("channel eigenvalue out of [-1, 1]");
    if (!clifford_channel.empty()) {
        double total = 0;
        for (const auto& t : clifford_channel) {
            if (!in01(t.prob)) throw std::invalid_argument("channel term probability out of range");
            total += t.prob;
        }
        if (total > 1.0 + 1e-12) throw std::invalid_argument("channel distribution sums above 1");
    }
}

std::vector<PauliNoiseSpec::ChannelTerm> PauliNoiseSpec::channel_for_width(int width) const {
    if (width == 2 && !clifford_channel.empty()) return clifford_channel;
    std::vector<ChannelTerm> out;
    if (p_c <= 0.0) return out;
    if (width == 1) {
        for (const char* p : {"X", "Y", "Z"}) out.push_back({p, p_c / 3.0});
    } else if (width == 2) {
        static const char letters[] = {'I', 'X', 'Y', 'Z'};
        for (char a : letters)
            for (char b : letters) {
                if (a == 'I' && b == 'I') continue;
                out.push_back({std::string{a, b}, p_c / 15.0});
            }
    } else {
        throw std::invalid_argument("clifford channels only defined for widths 1 and 2");
    }
    return out;
}

std::string PauliNoiseSpec::to_json() const {
    nlohmann::json j{{"p_x", p_x}, {"p_y", p_y}, {"p_z", p_z}, {"p_c", p_c}, {"p_e", p_e}};
    if (!clifford_channel.empty()) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& t : clifford_channel) arr.push_back({{"paulis", t.paulis}, {"prob", t.prob}});
        j["clifford_channel"] = arr;
    }
    return j.dump();
}

PauliNoiseSpec PauliNoiseSpec::from_json_text(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    PauliNoiseSpec n;
    n.p_x = j.value("p_x", 0.0);
    n.p_y = j.value("p_y", 0.0);
    n.p_z = j.value("p_z", 0.0);
    n.p_c = j.value("p_c", 0.0);
    n.p_e = j.value("p_e", 0.0);
    if (j.contains("clifford_channel"))
        for (const auto& t : j["clifford_channel"])
            n.clifford_channel.push_back({t.at("paulis").get<std::string>(), t.at("prob").get<double>()});
    n.validate();
    return n;
}

}  // namespace qsurr
