#pragma once

#include <levylmm/market.hpp>
#include <levylmm/mc.hpp>

#include <optional>
#include <string>

namespace levylmm::tools {

/// One pricing scenario: market data, driving measure, products and MC
/// settings.  Serializes to a stable JSON document (load -> save -> load is
/// the identity).
struct ScenarioConfig {
    std::vector<double> tenor_dates;
    std::vector<double> initial_libors;
    double b0_first = 1.0;

    // volatility loadings: either constant per rate or a full per-interval table
    std::vector<LoadingVec> vol_constant;                 // used when vol_pieces empty
    std::vector<std::vector<LoadingVec>> vol_pieces;

    // measure
    std::vector<std::vector<double>> c_matrix{{0.0}};
    std::string jump_type = "none";                       // none | cgmy | tabulated
    double cgmy_C = 0, cgmy_lambda_plus = 0, cgmy_lambda_minus = 0, cgmy_Y = 0;
    std::vector<double> tab_z, tab_density;

    int caplet_index = 1;
    double caplet_strike = 0.0;
    double swaption_strike = 0.0;
    std::vector<double> strike_grid;

    SimConfig mc;

    static ScenarioConfig from_json_text(const std::string& text);
    static ScenarioConfig load(const std::string& path);
    /// Bundled reproduction scenarios (tempered power-law cases 1..4).
    static ScenarioConfig builtin_case(int number);

    std::string to_json_text() const;

    LevyMeasure measure() const;
    MarketModel market() const;
};

} // namespace levylmm::tools
