#pragma once

#include "itgp/gp.hpp"
#include "itgp/itgp.hpp"

#include <string>

namespace itgp {

// A loaded model file: either a plain GP or an ITGP result. `gp` is always
// usable for prediction; for ITGP documents it aliases `itgp.gp`.
struct ModelDocument {
    bool is_itgp = false;
    TrainedGP gp;
    ITGPResult itgp;
};

void save_model(const TrainedGP& gp, const std::string& path);
void save_model(const ITGPResult& result, const std::string& path);

// Parses and validates a model file, rebuilding the cached Cholesky factor
// from the stored training arrays. Throws ModelError on malformed documents.
ModelDocument load_model(const std::string& path);

} // namespace itgp
