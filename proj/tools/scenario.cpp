#include "scenario.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace levylmm::tools {

using json = nlohmann::ordered_json;

namespace {

std::vector<LoadingVec> loading_rows(const json& j) {
    std::vector<LoadingVec> rows;
    for (const auto& row : j) rows.push_back(row.get<LoadingVec>());
    return rows;
}

// Flat 6% five-rate scenario of the numerical study; only the jump parameters
// differ between the four cases.
json base_case_json() {
    json j;
    j["tenor_dates"] = {5.0, 6.0, 7.0, 8.0, 9.0, 10.0};
    j["initial_libors"] = {0.06, 0.06, 0.06, 0.06, 0.06};
    j["b0_first"] = 0.7472581728660572;  // 1.06^-5
    j["volatility"] = {{"constant", {{1.0}, {1.0}, {1.0}, {1.0}, {1.0}}}};
    j["measure"] = {{"c", {{0.0}}},
                    {"jumps", {{"type", "cgmy"},
                               {"C", 0.0},
                               {"lambda_plus", 0.0},
                               {"lambda_minus", 0.0},
                               {"Y", 0.0}}}};
    j["caplet"] = {{"k", 1}, {"strike", 0.06}};
    j["swaption"] = {{"strike", 0.06}};
    j["strike_grid"] = {0.03, 0.04, 0.05, 0.06, 0.07, 0.08, 0.09};
    j["mc"] = {{"paths", 100000}, {"epsilon", 0.0}, {"dt", 0.05}, {"seed", 42}, {"threads", 0}};
    return j;
}

} // namespace

ScenarioConfig ScenarioConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("config parse error: ") + e.what());
    }
    ScenarioConfig cfg;
    try {
        cfg.tenor_dates = j.at("tenor_dates").get<std::vector<double>>();
        cfg.initial_libors = j.at("initial_libors").get<std::vector<double>>();
        cfg.b0_first = j.at("b0_first").get<double>();

        const auto& vol = j.at("volatility");
        if (vol.contains("constant")) {
            cfg.vol_constant = loading_rows(vol.at("constant"));
        } else {
            for (const auto& row : vol.at("pieces")) cfg.vol_pieces.push_back(loading_rows(row));
        }

        const auto& meas = j.at("measure");
        cfg.c_matrix = meas.at("c").get<std::vector<std::vector<double>>>();
        const auto& jumps = meas.at("jumps");
        cfg.jump_type = jumps.at("type").get<std::string>();
        if (cfg.jump_type == "cgmy") {
            cfg.cgmy_C = jumps.at("C").get<double>();
            cfg.cgmy_lambda_plus = jumps.at("lambda_plus").get<double>();
            cfg.cgmy_lambda_minus = jumps.at("lambda_minus").get<double>();
            cfg.cgmy_Y = jumps.at("Y").get<double>();
        } else if (cfg.jump_type == "tabulated") {
            cfg.tab_z = jumps.at("z").get<std::vector<double>>();
            cfg.tab_density = jumps.at("density").get<std::vector<double>>();
        } else if (cfg.jump_type != "none") {
            throw std::invalid_argument("unknown jump type: " + cfg.jump_type);
        }

        cfg.caplet_index = j.at("caplet").at("k").get<int>();
        cfg.caplet_strike = j.at("caplet").at("strike").get<double>();
        cfg.swaption_strike = j.at("swaption").at("strike").get<double>();
        cfg.strike_grid = j.at("strike_grid").get<std::vector<double>>();

        const auto& mc = j.at("mc");
        cfg.mc.paths = mc.at("paths").get<std::int64_t>();
        cfg.mc.epsilon = mc.at("epsilon").get<double>();
        cfg.mc.dt = mc.at("dt").get<double>();
        cfg.mc.seed = mc.at("seed").get<std::uint64_t>();
        if (mc.contains("threads")) cfg.mc.threads = mc.at("threads").get<int>();
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config schema error: ") + e.what());
    }
    return cfg;
}

ScenarioConfig ScenarioConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

ScenarioConfig ScenarioConfig::builtin_case(int number) {
    json j = base_case_json();
    auto& g = j["measure"]["jumps"];
    switch (number) {
        case 1: g["C"] = 0.01; g["lambda_plus"] = 10.0; g["lambda_minus"] = 20.0; g["Y"] = 1.8; break;
        case 2: g["C"] = 0.1;  g["lambda_plus"] = 10.0; g["lambda_minus"] = 20.0; g["Y"] = 1.2; break;
        case 3: g["C"] = 0.2;  g["lambda_plus"] = 10.0; g["lambda_minus"] = 20.0; g["Y"] = 0.5; break;
        case 4: g["C"] = 0.2;  g["lambda_plus"] = 3.0;  g["lambda_minus"] = 5.0;  g["Y"] = 0.2; break;
        default:
            throw std::invalid_argument("builtin case must be 1..4");
    }
    return from_json_text(j.dump());
}

std::string ScenarioConfig::to_json_text() const {
    json j;
    j["tenor_dates"] = tenor_dates;
    j["initial_libors"] = initial_libors;
    j["b0_first"] = b0_first;
    if (!vol_pieces.empty()) {
        json rows = json::array();
        for (const auto& row : vol_pieces) rows.push_back(row);
        j["volatility"] = {{"pieces", rows}};
    } else {
        j["volatility"] = {{"constant", vol_constant}};
    }
    json jumps;
    jumps["type"] = jump_type;
    if (jump_type == "cgmy") {
        jumps["C"] = cgmy_C;
        jumps["lambda_plus"] = cgmy_lambda_plus;
        jumps["lambda_minus"] = cgmy_lambda_minus;
        jumps["Y"] = cgmy_Y;
    } else if (jump_type == "tabulated") {
        jumps["z"] = tab_z;
        jumps["density"] = tab_density;
    }
    j["measure"] = {{"c", c_matrix}, {"jumps", jumps}};
    j["caplet"] = {{"k", caplet_index}, {"strike", caplet_strike}};
    j["swaption"] = {{"strike", swaption_strike}};
    j["strike_grid"] = strike_grid;
    j["mc"] = {{"paths", mc.paths}, {"epsilon", mc.epsilon}, {"dt", mc.dt},
               {"seed", mc.seed}, {"threads", mc.threads}};
    return j.dump(2) + "\n";
}

LevyMeasure ScenarioConfig::measure() const {
    const int d = static_cast<int>(c_matrix.size());
    std::vector<double> c;
    for (const auto& row : c_matrix) {
        if (row.size() != static_cast<std::size_t>(d))
            throw std::invalid_argument("config: c must be square");
        c.insert(c.end(), row.begin(), row.end());
    }
    JumpPart jumps;
    if (jump_type == "cgmy")
        jumps = CgmyJumps{cgmy_C, cgmy_lambda_plus, cgmy_lambda_minus, cgmy_Y};
    else if (jump_type == "tabulated")
        jumps = TabulatedJumps{tab_z, tab_density};
    else
        jumps = NoJumps{};
    return LevyMeasure(d, std::move(c), std::move(jumps));
}

MarketModel ScenarioConfig::market() const {
    TenorStructure tenor(tenor_dates);
    InitialCurve curve{initial_libors, b0_first};
    VolatilitySpec vols = vol_pieces.empty() ? VolatilitySpec::constant(tenor, vol_constant)
                                             : VolatilitySpec(tenor, vol_pieces);
    return MarketModel(std::move(tenor), std::move(curve), std::move(vols), measure());
}

} // namespace levylmm::tools
