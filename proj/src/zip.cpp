#include "fixrev/zip.hpp"

#include <zlib.h>

#include <ctime>
#include <limits>

#include "fixrev/errors.hpp"

namespace fixrev {
namespace zip {

namespace {

constexpr std::uint32_t kLocalSig = 0x04034b50;
constexpr std::uint32_t kCentralSig = 0x02014b50;
constexpr std::uint32_t kEocdSig = 0x06054b50;
constexpr std::size_t kEocdSize = 22;
constexpr std::size_t kLocalHeaderSize = 30;
constexpr std::size_t kCentralHeaderSize = 46;

std::uint16_t rd16(std::string_view b, std::size_t off) {
    return static_cast<std::uint16_t>(static_cast<unsigned char>(b[off]) |
                                      (static_cast<unsigned char>(b[off + 1]) << 8));
}

std::uint32_t rd32(std::string_view b, std::size_t off) {
    return static_cast<std::uint32_t>(static_cast<unsigned char>(b[off])) |
           (static_cast<std::uint32_t>(static_cast<unsigned char>(b[off + 1])) << 8) |
           (static_cast<std::uint32_t>(static_cast<unsigned char>(b[off + 2])) << 16) |
           (static_cast<std::uint32_t>(static_cast<unsigned char>(b[off + 3])) << 24);
}

void wr16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
}

void wr32(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
    out.push_back(static_cast<char>((v >> 16) & 0xff));
    out.push_back(static_cast<char>((v >> 24) & 0xff));
}

std::uint32_t crc_of(std::string_view data) {
    uLong crc = crc32(0L, Z_NULL, 0);
    if (!data.empty()) {
        crc = crc32(crc, reinterpret_cast<const Bytef*>(data.data()), static_cast<uInt>(data.size()));
    }
    return static_cast<std::uint32_t>(crc);
}

std::string inflate_raw(std::string_view compressed, std::uint64_t expected_size) {
    z_stream zs{};
    if (inflateInit2(&zs, -15) != Z_OK) {
        throw Error(ErrorCode::IoError, "inflateInit failed");
    }
    std::string out;
    out.resize(expected_size);
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(compressed.data()));
    zs.avail_in = static_cast<uInt>(compressed.size());
    zs.next_out = reinterpret_cast<Bytef*>(out.data());
    zs.avail_out = static_cast<uInt>(out.size());
    int rc = inflate(&zs, Z_FINISH);
    bool complete = (rc == Z_STREAM_END) || (rc == Z_OK && expected_size == 0 && zs.avail_in == 0);
    std::uint64_t produced = zs.total_out;
    inflateEnd(&zs);
    if (!complete || produced != expected_size) {
        throw Error(ErrorCode::CorruptArchive, "deflate stream truncated or size mismatch");
    }
    return out;
}

std::string deflate_raw(std::string_view data, int level) {
    z_stream zs{};
    if (deflateInit2(&zs, level, Z_DEFLATED, -15, 8, Z_DEFAULT_STRATEGY) != Z_OK) {
        throw Error(ErrorCode::IoError, "deflateInit failed");
    }
    std::string out;
    out.resize(deflateBound(&zs, static_cast<uLong>(data.size())));
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
    zs.avail_in = static_cast<uInt>(data.size());
    zs.next_out = reinterpret_cast<Bytef*>(out.data());
    zs.avail_out = static_cast<uInt>(out.size());
    int rc = deflate(&zs, Z_FINISH);
    std::uint64_t produced = zs.total_out;
    deflateEnd(&zs);
    if (rc != Z_STREAM_END) {
        throw Error(ErrorCode::IoError, "deflate failed");
    }
    out.resize(produced);
    return out;
}

}  // namespace

bool looks_like_zip(std::string_view bytes) {
    if (bytes.size() < 4) return false;
    std::uint32_t sig = rd32(bytes, 0);
    return sig == kLocalSig || sig == kEocdSig;
}

std::vector<ExtractedEntry> extract_all(std::string_view bytes) {
    if (!looks_like_zip(bytes)) {
        throw Error(ErrorCode::UnsupportedFormat, "input does not carry a ZIP signature");
    }

    // EOCD: scan back from the end, accept the record whose comment length
    // reaches exactly to EOF.
    if (bytes.size() < kEocdSize) {
        throw Error(ErrorCode::CorruptArchive, "shorter than an end-of-central-directory record");
    }
    std::size_t scan_floor = bytes.size() >= kEocdSize + 0xffff ? bytes.size() - kEocdSize - 0xffff : 0;
    std::size_t eocd = std::string_view::npos;
    for (std::size_t pos = bytes.size() - kEocdSize + 1; pos-- > scan_floor;) {
        if (rd32(bytes, pos) == kEocdSig) {
            std::uint16_t comment_len = rd16(bytes, pos + 20);
            if (pos + kEocdSize + comment_len == bytes.size()) {
                eocd = pos;
                break;
            }
        }
    }
    if (eocd == std::string_view::npos) {
        throw Error(ErrorCode::CorruptArchive, "end-of-central-directory record not found");
    }

    std::uint16_t disk = rd16(bytes, eocd + 4);
    std::uint16_t entry_count = rd16(bytes, eocd + 10);
    std::uint32_t cd_size = rd32(bytes, eocd + 12);
    std::uint32_t cd_offset = rd32(bytes, eocd + 16);
    if (disk != 0) {
        throw Error(ErrorCode::UnsupportedFormat, "multi-disk archives not supported");
    }
    if (entry_count == 0xffff || cd_offset == 0xffffffffu || cd_size == 0xffffffffu) {
        throw Error(ErrorCode::UnsupportedFormat, "zip64 archives not supported");
    }
    if (static_cast<std::uint64_t>(cd_offset) + cd_size > eocd) {
        throw Error(ErrorCode::CorruptArchive, "central directory extends past its end record");
    }

    std::vector<ExtractedEntry> out;
    out.reserve(entry_count);
    std::size_t pos = cd_offset;
    for (std::uint16_t i = 0; i < entry_count; ++i) {
        if (pos + kCentralHeaderSize > eocd || rd32(bytes, pos) != kCentralSig) {
            throw Error(ErrorCode::CorruptArchive, "bad central directory header");
        }
        std::uint16_t flags = rd16(bytes, pos + 8);
        std::uint16_t method = rd16(bytes, pos + 10);
        std::uint32_t crc = rd32(bytes, pos + 16);
        std::uint32_t csize = rd32(bytes, pos + 20);
        std::uint32_t usize = rd32(bytes, pos + 24);
        std::uint16_t name_len = rd16(bytes, pos + 28);
        std::uint16_t extra_len = rd16(bytes, pos + 30);
        std::uint16_t comment_len = rd16(bytes, pos + 32);
        std::uint32_t local_offset = rd32(bytes, pos + 42);

        if (pos + kCentralHeaderSize + name_len > eocd) {
            throw Error(ErrorCode::CorruptArchive, "entry name extends past central directory");
        }
        std::string name(bytes.substr(pos + kCentralHeaderSize, name_len));
        pos += kCentralHeaderSize + name_len + extra_len + comment_len;

        if (flags & 0x0001) {
            throw Error(ErrorCode::UnsupportedFormat, "encrypted entry: " + name);
        }
        bool is_directory = !name.empty() && name.back() == '/';
        if (is_directory) {
            continue;
        }
        if (method != 0 && method != 8) {
            throw Error(ErrorCode::UnsupportedFormat,
                        "compression method " + std::to_string(method) + " in entry " + name);
        }

        if (static_cast<std::uint64_t>(local_offset) + kLocalHeaderSize > bytes.size() ||
            rd32(bytes, local_offset) != kLocalSig) {
            throw Error(ErrorCode::CorruptArchive, "bad local header for entry " + name);
        }
        std::uint16_t l_name_len = rd16(bytes, local_offset + 26);
        std::uint16_t l_extra_len = rd16(bytes, local_offset + 28);
        std::uint64_t data_start =
            static_cast<std::uint64_t>(local_offset) + kLocalHeaderSize + l_name_len + l_extra_len;
        if (data_start + csize > bytes.size()) {
            throw Error(ErrorCode::CorruptArchive, "entry data truncated: " + name);
        }

        std::string_view raw = bytes.substr(data_start, csize);
        std::string data;
        if (method == 0) {
            if (csize != usize) {
                throw Error(ErrorCode::CorruptArchive, "stored entry size mismatch: " + name);
            }
            data.assign(raw);
        } else {
            data = inflate_raw(raw, usize);
        }
        if (crc_of(data) != crc) {
            throw Error(ErrorCode::CorruptArchive, "CRC mismatch in entry " + name);
        }
        out.push_back(ExtractedEntry{std::move(name), std::move(data)});
    }
    return out;
}

std::uint32_t dos_datetime_from_epoch(std::int64_t epoch_seconds) {
    std::time_t t = static_cast<std::time_t>(epoch_seconds);
    std::tm tm{};
    gmtime_r(&t, &tm);
    int year = tm.tm_year + 1900;
    if (year < 1980) {  // DOS epoch floor
        year = 1980;
        tm.tm_mon = 0;
        tm.tm_mday = 1;
        tm.tm_hour = tm.tm_min = tm.tm_sec = 0;
    }
    std::uint32_t date = static_cast<std::uint32_t>(((year - 1980) << 9) | ((tm.tm_mon + 1) << 5) | tm.tm_mday);
    std::uint32_t time = static_cast<std::uint32_t>((tm.tm_hour << 11) | (tm.tm_min << 5) | (tm.tm_sec / 2));
    return (date << 16) | time;
}

std::string build(const std::vector<BuildEntry>& entries, const BuildOptions& options) {
    if (entries.size() > 0xfffe) {
        throw Error(ErrorCode::IoError, "too many entries for a non-zip64 archive");
    }
    std::uint16_t dos_time = static_cast<std::uint16_t>(options.dos_datetime & 0xffff);
    std::uint16_t dos_date = static_cast<std::uint16_t>(options.dos_datetime >> 16);

    std::string out;
    struct Central {
        std::string name;
        std::uint16_t method;
        std::uint32_t crc, csize, usize, offset;
    };
    std::vector<Central> centrals;
    centrals.reserve(entries.size());

    for (const auto& e : entries) {
        std::uint32_t crc = crc_of(e.data);
        std::uint16_t method = options.compression_level == 0 ? 0 : 8;
        std::string packed =
            method == 0 ? e.data : deflate_raw(e.data, options.compression_level);
        if (e.data.size() > std::numeric_limits<std::uint32_t>::max() ||
            packed.size() > std::numeric_limits<std::uint32_t>::max()) {
            throw Error(ErrorCode::IoError, "entry too large for a non-zip64 archive: " + e.path);
        }
        std::uint32_t offset = static_cast<std::uint32_t>(out.size());

        wr32(out, kLocalSig);
        wr16(out, 20);      // version needed
        wr16(out, 0);       // flags
        wr16(out, method);
        wr16(out, dos_time);
        wr16(out, dos_date);
        wr32(out, crc);
        wr32(out, static_cast<std::uint32_t>(packed.size()));
        wr32(out, static_cast<std::uint32_t>(e.data.size()));
        wr16(out, static_cast<std::uint16_t>(e.path.size()));
        wr16(out, 0);       // extra len
        out += e.path;
        out += packed;

        centrals.push_back(Central{e.path, method, crc, static_cast<std::uint32_t>(packed.size()),
                                   static_cast<std::uint32_t>(e.data.size()), offset});
    }

    std::uint32_t cd_offset = static_cast<std::uint32_t>(out.size());
    for (const auto& c : centrals) {
        wr32(out, kCentralSig);
        wr16(out, 20);      // version made by
        wr16(out, 20);      // version needed
        wr16(out, 0);       // flags
        wr16(out, c.method);
        wr16(out, dos_time);
        wr16(out, dos_date);
        wr32(out, c.crc);
        wr32(out, c.csize);
        wr32(out, c.usize);
        wr16(out, static_cast<std::uint16_t>(c.name.size()));
        wr16(out, 0);       // extra len
        wr16(out, 0);       // comment len
        wr16(out, 0);       // disk number
        wr16(out, 0);       // internal attrs
        wr32(out, 0);       // external attrs
        wr32(out, c.offset);
        out += c.name;
    }
    std::uint32_t cd_size = static_cast<std::uint32_t>(out.size()) - cd_offset;

    wr32(out, kEocdSig);
    wr16(out, 0);  // this disk
    wr16(out, 0);  // cd start disk
    wr16(out, static_cast<std::uint16_t>(centrals.size()));
    wr16(out, static_cast<std::uint16_t>(centrals.size()));
    wr32(out, cd_size);
    wr32(out, cd_offset);
    wr16(out, 0);  // comment len
    return out;
}

}  // namespace zip

HashManifest normalize_archive(std::string_view archive, ArchiveFormat format) {
    if (format != ArchiveFormat::Zip) {
        throw Error(ErrorCode::UnsupportedFormat, "only ZIP normalization is supported");
    }
    auto extracted = zip::extract_all(archive);
    std::vector<ManifestEntry> entries;
    entries.reserve(extracted.size());
    for (auto& e : extracted) {
        entries.push_back(ManifestEntry{normalize_path(e.path), digest_bytes(e.data),
                                        static_cast<std::uint64_t>(e.data.size())});
    }
    return HashManifest::from_entries(std::move(entries));
}

}  // namespace fixrev
