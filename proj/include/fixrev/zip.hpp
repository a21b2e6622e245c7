#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "fixrev/manifest.hpp"

namespace fixrev {

enum class ArchiveFormat { Zip };

namespace zip {

struct ExtractedEntry {
    std::string path;  // raw stored name (not yet normalized)
    std::string data;  // decompressed payload
};

// True when the byte stream carries a ZIP local-file or end-of-central-
// directory signature at offset 0 (covers empty archives).
bool looks_like_zip(std::string_view bytes);

// Decompresses every file entry (directory entries skipped). Entry order
// follows the central directory. Throws UnsupportedFormat for non-ZIP input
// or features outside stored/deflate, CorruptArchive for truncation, bad
// structure, size or CRC mismatches.
std::vector<ExtractedEntry> extract_all(std::string_view bytes);

struct BuildEntry {
    std::string path;
    std::string data;
};

struct BuildOptions {
    std::uint32_t dos_datetime = 0x21000000;  // 1980-08-01 00:00:00 packed date<<16|time
    int compression_level = 6;                // 0 = stored, 1..9 = deflate
};

// Packs the packed DOS date/time pair used in ZIP headers (2 s resolution,
// floor 1980-01-01).
std::uint32_t dos_datetime_from_epoch(std::int64_t epoch_seconds);

// Emits a complete ZIP archive. Deterministic: identical entries + options
// yield identical bytes. Entry order is preserved as given.
std::string build(const std::vector<BuildEntry>& entries, const BuildOptions& options);

}  // namespace zip

// Identity of an archive's contents with container metadata (timestamps,
// entry order, compression level) ignored: a manifest over decompressed
// payloads keyed by normalized entry path.
// Throws UnsupportedFormat / CorruptArchive / DuplicatePath.
HashManifest normalize_archive(std::string_view archive, ArchiveFormat format);

}  // namespace fixrev
