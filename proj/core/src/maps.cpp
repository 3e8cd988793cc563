#include "drain/maps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "drain/errors.hpp"

namespace drain::eval {

GridField grid_difference(const GridField& ref, const GridField& est)
{
    if (!(ref.spec == est.spec)) {
        throw UsageError("grid_difference needs identical grid geometry");
    }
    GridField out(ref.spec);
    for (std::size_t k = 0; k < out.spec.size(); ++k) {
        if (ref.count[k] > 0 && est.count[k] > 0) {
            out.mean[k] = ref.mean[k] - est.mean[k];
            out.count[k] = std::min(ref.count[k], est.count[k]);
        }
    }
    return out;
}

GridField pixel_difference_grid(std::span<const float> lat, std::span<const float> lon,
                                std::span<const float> ref, std::span<const float> est, const GridSpec& spec)
{
    if (lat.size() != lon.size() || lat.size() != ref.size() || ref.size() != est.size()) {
        throw UsageError("pixel_difference_grid inputs have different lengths");
    }
    std::vector<float> diff(ref.size(), std::numeric_limits<float>::quiet_NaN());
    for (std::size_t i = 0; i < diff.size(); ++i) {
        if (std::isfinite(ref[i]) && std::isfinite(est[i])) {
            diff[i] = ref[i] - est[i];
        }
    }
    return colocation::grid_average(lat, lon, diff, spec, -std::numeric_limits<double>::infinity());
}

}  // namespace drain::eval
