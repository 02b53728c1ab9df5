#pragma once

#include <string>

#include "spfcast/data.hpp"

namespace spfcast {

/// Frozen input stores plus fingerprints of their canonical serializations.
struct Stores {
    VintageStore cpi;
    SurveyPanel spf;
    std::string cpi_hash;
    std::string spf_hash;
};

/// cpi_vintages.csv: header `vintage,month,level` with vintage YYYYQn,
/// month YYYY-MM, level a positive decimal.
VintageStore parse_cpi_csv(const std::string& text);

/// spf_panel.csv: header `origin,horizon,forecaster_id,value` with origin
/// YYYYQn, horizon 1..5, value a decimal in percentage points.
SurveyPanel parse_spf_csv(const std::string& text);

/// Reads both input files, validates, freezes.
Stores load_stores_csv(const std::string& cpi_path, const std::string& spf_path);

/// Canonical serializations: rows sorted, one normalized form per store, so
/// equal data always produces identical bytes (and hashes).
std::string cpi_to_csv(const VintageStore& store);
std::string spf_to_csv(const SurveyPanel& panel);

/// A store directory holds the two normalized CSVs plus manifest.json with
/// their hashes and row counts.
void write_store_dir(const std::string& dir, const Stores& stores);
Stores load_store_dir(const std::string& dir);

}  // namespace spfcast
