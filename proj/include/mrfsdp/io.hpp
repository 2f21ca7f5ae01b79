#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "mrfsdp/encoding.hpp"
#include "mrfsdp/mrf.hpp"

namespace mrfsdp {

/// Canonical instance document. Terms keep their stored order, so equal
/// instances serialise to identical bytes.
std::string serialize_instance(const MrfInstance& mrf);

/// Strict parse: unknown keys, missing keys, wrong types and invariant
/// violations all throw InvalidInputError.
MrfInstance parse_instance(std::string_view text);

MrfInstance read_instance(const std::filesystem::path& path);
void write_instance(const std::filesystem::path& path, const MrfInstance& mrf);

/// {"labeling": [...]} documents, used for ground truth files.
std::string serialize_labeling(const Labeling& x);
Labeling parse_labeling(std::string_view text);

/// 64-bit FNV-1a of the canonical serialisation, as 16 hex digits.
std::string instance_fingerprint(const MrfInstance& mrf);

/// Whole file or InvalidInputError.
std::string read_text_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file, then renames over `path`.
/// Throws InvalidInputError when the location is not writable.
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view content);

/// "% rows cols nnz offset" header line followed by one "row col value"
/// line per stored entry, column-major, 0-based.
std::string export_triplets(const SparseMatrix& m, double offset);

}  // namespace mrfsdp
