#include <compnoma/channel_model.hpp>
#include <compnoma/noma_core.hpp>

#include <cmath>
#include <limits>

namespace compnoma {

std::string to_string(CellId c) { return "c" + std::to_string(index_of(c)); }
std::string to_string(UserId u) { return "u" + std::to_string(index_of(u)); }

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) { return 10.0 * std::log10(linear); }
double dbm_to_mw(double dbm) { return db_to_linear(dbm); }
double mw_to_dbm(double mw) { return linear_to_db(mw); }

void RadioParams::validate() const
{
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!positive(tx_power_mw)) throw ValidationError("radio.tx_power", "must be > 0");
    if (!positive(noise_density_mw_per_hz)) throw ValidationError("radio.noise_density", "must be > 0");
    if (!positive(bandwidth_hz)) throw ValidationError("radio.bandwidth", "must be > 0");
    if (!std::isfinite(pathloss_exponent) || pathloss_exponent < 2.0)
        throw ValidationError("radio.pathloss_exponent", "must be >= 2");
    if (!std::isfinite(sic_tolerance) || sic_tolerance < 0.0)
        throw ValidationError("radio.sic_tolerance", "must be >= 0");
}

double normalized_gain(double distance_m, double fading_power, const RadioParams& params)
{
    if (!(distance_m > 0.0)) throw DomainError("normalized_gain: distance must be positive");
    if (!(fading_power >= 0.0)) throw DomainError("normalized_gain: fading power must be non-negative");
    return fading_power * std::pow(distance_m, -params.pathloss_exponent) / params.noise_power_mw();
}

ChannelRealization::ChannelRealization(std::size_t num_cells, std::size_t num_users)
    : num_cells_(num_cells), num_users_(num_users),
      gains_(num_cells * num_users, std::numeric_limits<double>::quiet_NaN())
{
}

std::size_t ChannelRealization::slot(CellId cell, UserId user) const
{
    if (index_of(cell) >= num_cells_ || index_of(user) >= num_users_)
        throw LookupError("no gain for link " + to_string(cell) + "->" + to_string(user));
    return index_of(cell) * num_users_ + index_of(user);
}

double ChannelRealization::gain(CellId cell, UserId user) const
{
    const double g = gains_[slot(cell, user)];
    if (std::isnan(g)) throw LookupError("no gain for link " + to_string(cell) + "->" + to_string(user));
    return g;
}

bool ChannelRealization::has(CellId cell, UserId user) const
{
    if (index_of(cell) >= num_cells_ || index_of(user) >= num_users_) return false;
    return !std::isnan(gains_[index_of(cell) * num_users_ + index_of(user)]);
}

void ChannelRealization::set(CellId cell, UserId user, double gain)
{
    if (!(gain >= 0.0)) throw DomainError("channel gain must be non-negative");
    gains_[slot(cell, user)] = gain;
}

bool ChannelRealization::operator==(const ChannelRealization& other) const
{
    if (num_cells_ != other.num_cells_ || num_users_ != other.num_users_) return false;
    for (std::size_t i = 0; i < gains_.size(); ++i) {
        const double a = gains_[i], b = other.gains_[i];
        if (!(a == b || (std::isnan(a) && std::isnan(b)))) return false;
    }
    return true;
}

ChannelRealization draw_realization(std::span<const Cell> cells, std::span<const UserEquipment> users,
                                    const RadioParams& params, TrialStream& stream)
{
    ChannelRealization realization(cells.size(), users.size());
    for (const Cell& cell : cells) {
        for (const UserEquipment& ue : users) {
            const double fading = stream.exponential();
            realization.set(cell.id, ue.id, normalized_gain(distance(cell.position, ue.position), fading, params));
        }
    }
    return realization;
}

}  // namespace compnoma
