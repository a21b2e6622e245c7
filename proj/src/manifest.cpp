#include "fixrev/manifest.hpp"

#include <algorithm>

#include "fixrev/errors.hpp"

namespace fixrev {

std::string normalize_path(std::string_view raw) {
    std::string s(raw);
    std::replace(s.begin(), s.end(), '\\', '/');
    if (s.empty()) {
        throw Error(ErrorCode::InvalidPath, "empty path");
    }
    if (s.front() == '/') {
        throw Error(ErrorCode::InvalidPath, "absolute path not allowed: " + s);
    }

    std::vector<std::string> segments;
    std::size_t start = 0;
    while (start <= s.size()) {
        std::size_t end = s.find('/', start);
        if (end == std::string::npos) end = s.size();
        std::string seg = s.substr(start, end - start);
        if (seg == "..") {
            throw Error(ErrorCode::InvalidPath, "path escapes root: " + s);
        }
        if (!seg.empty() && seg != ".") {
            segments.push_back(std::move(seg));
        }
        start = end + 1;
    }
    if (segments.empty()) {
        throw Error(ErrorCode::InvalidPath, "path has no usable segments: " + s);
    }

    std::string out = segments.front();
    for (std::size_t i = 1; i < segments.size(); ++i) {
        out += '/';
        out += segments[i];
    }
    return out;
}

HashManifest::HashManifest() : manifest_digest_(digest_bytes("")) {}

HashManifest HashManifest::from_entries(std::vector<ManifestEntry> entries) {
    std::sort(entries.begin(), entries.end(),
              [](const ManifestEntry& a, const ManifestEntry& b) { return a.path < b.path; });
    for (std::size_t i = 1; i < entries.size(); ++i) {
        if (entries[i].path == entries[i - 1].path) {
            throw Error(ErrorCode::DuplicatePath, entries[i].path);
        }
    }
    HashManifest m;
    m.entries_ = std::move(entries);
    m.manifest_digest_ = digest_bytes(m.canonical_text());
    return m;
}

HashManifest HashManifest::from_files(const std::vector<FileEntry>& files) {
    std::vector<ManifestEntry> entries;
    entries.reserve(files.size());
    for (const auto& f : files) {
        entries.push_back(ManifestEntry{normalize_path(f.path), digest_bytes(f.content),
                                        static_cast<std::uint64_t>(f.content.size())});
    }
    return from_entries(std::move(entries));
}

std::string HashManifest::canonical_text() const {
    std::string text;
    for (const auto& e : entries_) {
        text += e.digest.hex();
        text += "  ";
        text += e.path;
        text += '\n';
    }
    return text;
}

HashManifest build_manifest(const std::vector<FileEntry>& files) { return HashManifest::from_files(files); }

}  // namespace fixrev
