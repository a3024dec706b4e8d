#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "stripscreen/dataset.hpp"

namespace stripscreen::data {

struct RowRejection {
    std::size_t line = 0;  // 1-based line number in the file
    std::string id;        // empty when the id column itself was unreadable
    std::string reason;
};

struct IngestReport {
    std::size_t rows_read = 0;
    std::size_t rows_kept = 0;
    std::vector<RowRejection> rejected;
};

// Exact column layout: id,center,age,gender,diabetes,blood_pressure,smoking,
// pcr_label, then <Pad>_R,<Pad>_G,<Pad>_B per pad in canonical order.
std::string csv_header();

// Reads and validates a dataset. strict=true aborts on the first violation
// (DataError naming line and column); strict=false drops offending rows and
// records them in `report`. Duplicate ids keep the first occurrence.
Dataset ingest_csv(const std::filesystem::path& path, bool strict,
                   IngestReport* report = nullptr);

// Inverse of ingest_csv for valid datasets: ingest(emit(ds)) == ds field by
// field.
void write_csv(const Dataset& ds, const std::filesystem::path& path);
std::string to_csv(const Dataset& ds);

}  // namespace stripscreen::data
