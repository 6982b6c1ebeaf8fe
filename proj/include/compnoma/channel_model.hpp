#pragma once

#include <compnoma/rng.hpp>
#include <compnoma/types.hpp>

#include <span>
#include <vector>

namespace compnoma {

struct Cell;
struct UserEquipment;

double db_to_linear(double db);
double linear_to_db(double linear);
double dbm_to_mw(double dbm);
double mw_to_dbm(double mw);

/// Link-budget parameters shared by every cell, in linear units.
struct RadioParams {
    double tx_power_mw = 0.0;
    double noise_density_mw_per_hz = 0.0;
    double bandwidth_hz = 0.0;
    double pathloss_exponent = 0.0;
    /// Minimum noise-normalized received-power gap for SIC (linear ratio).
    double sic_tolerance = 0.0;

    double noise_power_mw() const { return noise_density_mw_per_hz * bandwidth_hz; }

    /// Throws ValidationError naming the first bad field.
    void validate() const;
};

/// Normalized channel power gain per unit transmit power (1/mW):
/// fading_power * distance^-alpha / (N0 * B).
double normalized_gain(double distance_m, double fading_power, const RadioParams& params);

/// Normalized gains for every (cell, user) link of one trial. Storage is dense;
/// ids index directly. Unset entries raise LookupError on access.
class ChannelRealization {
public:
    ChannelRealization() = default;
    ChannelRealization(std::size_t num_cells, std::size_t num_users);

    double gain(CellId cell, UserId user) const;
    bool has(CellId cell, UserId user) const;
    void set(CellId cell, UserId user, double gain);

    std::size_t num_cells() const { return num_cells_; }
    std::size_t num_users() const { return num_users_; }

    bool operator==(const ChannelRealization& other) const;

private:
    std::size_t slot(CellId cell, UserId user) const;

    std::size_t num_cells_ = 0;
    std::size_t num_users_ = 0;
    std::vector<double> gains_;
};

/// Draws Exp(1) fading for every (cell, user) pair, cell-major, and applies the
/// path-loss law. Cells and users must carry ids 0..n-1.
ChannelRealization draw_realization(std::span<const Cell> cells, std::span<const UserEquipment> users,
                                    const RadioParams& params, TrialStream& stream);

}  // namespace compnoma
