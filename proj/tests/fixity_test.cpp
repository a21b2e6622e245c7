#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include "fixrev/errors.hpp"
#include "fixrev/manifest.hpp"
#include "fixrev/stability.hpp"
#include "fixrev/zip.hpp"

using namespace fixrev;

namespace {

// FIPS 180-4 vectors, cross-checked against python hashlib before freezing.
constexpr const char* kEmptyDigest = "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855";
constexpr const char* kAbcDigest = "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad";
constexpr const char* k56ByteDigest = "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1";

// sha256 of "ba7816bf...  a.txt\n" (the canonical one-line manifest),
// computed with python hashlib.
constexpr const char* kOneLineManifestDigest =
    "0a15a7183e51f53aebd44146e21684968f7098e7cd354fcccec444b9867843f0";

// Manifest digest of the fixture payload set, computed by
// tests/data/make_fixtures.py with python's zipfile + hashlib.
constexpr const char* kFixturePayloadDigest =
    "2396812194649e0d69881cc7b9549a167ca83a3300f7017d0b458a19f3be2e81";

std::string fixture_dir() {
    const char* env = std::getenv("FIXREV_TEST_DATA");
    return env ? env : "tests/data";
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE_MESSAGE(in.good(), "missing fixture ", path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return ErrorCode::IoError;
}

}  // namespace

TEST_CASE("digest_bytes matches the frozen FIPS vectors") {
    CHECK(digest_bytes("").hex() == kEmptyDigest);
    CHECK(digest_bytes("abc").hex() == kAbcDigest);
    CHECK(digest_bytes("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq").hex() == k56ByteDigest);
}

TEST_CASE("digest_bytes is deterministic and streaming agrees with one-shot") {
    std::mt19937 rng(7);
    for (int i = 0; i < 50; ++i) {
        std::string data(static_cast<std::size_t>(rng() % 4096), '\0');
        for (auto& c : data) c = static_cast<char>(rng() & 0xff);
        CHECK(digest_bytes(data) == digest_bytes(data));
        Sha256 h;
        std::size_t half = data.size() / 2;
        h.update(std::string_view(data).substr(0, half));
        h.update(std::string_view(data).substr(half));
        CHECK(h.finish() == digest_bytes(data));
    }
}

TEST_CASE("Digest::from_hex validates shape") {
    CHECK(Digest::from_hex(kAbcDigest).hex() == kAbcDigest);
    CHECK(code_of([] { Digest::from_hex("abc"); }) == ErrorCode::InvalidDigest);
    std::string upper(kAbcDigest);
    upper[0] = 'B';
    CHECK(code_of([&] { Digest::from_hex(upper); }) == ErrorCode::InvalidDigest);
}

TEST_CASE("build_manifest canonical values") {
    SUBCASE("empty set hashes the empty canonical text") {
        HashManifest m = build_manifest({});
        CHECK(m.entries().empty());
        CHECK(m.canonical_text().empty());
        CHECK(m.manifest_digest().hex() == kEmptyDigest);
    }
    SUBCASE("single entry matches the frozen canonical line digest") {
        HashManifest m = build_manifest({{"a.txt", "abc"}});
        REQUIRE(m.entries().size() == 1);
        CHECK(m.entries()[0].digest.hex() == kAbcDigest);
        CHECK(m.entries()[0].size == 3);
        CHECK(m.canonical_text() == std::string(kAbcDigest) + "  a.txt\n");
        CHECK(m.manifest_digest().hex() == kOneLineManifestDigest);
    }
}

TEST_CASE("build_manifest is order invariant") {
    std::vector<FileEntry> forward{{"a.txt", "one"}, {"b.txt", "two"}, {"c/d.txt", "three"}};
    std::vector<FileEntry> backward{forward[2], forward[1], forward[0]};
    CHECK(build_manifest(forward) == build_manifest(backward));
    CHECK(build_manifest(forward).canonical_text() == build_manifest(backward).canonical_text());

    std::mt19937 rng(11);
    for (int trial = 0; trial < 25; ++trial) {
        std::vector<FileEntry> files;
        int n = 1 + static_cast<int>(rng() % 8);
        for (int i = 0; i < n; ++i) {
            files.push_back({"f" + std::to_string(i) + ".bin", std::string(1 + rng() % 32, char('a' + i))});
        }
        auto shuffled = files;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        CHECK(build_manifest(files) == build_manifest(shuffled));
    }
}

TEST_CASE("build_manifest rejects bad paths") {
    CHECK(code_of([] { build_manifest({{"a.txt", "x"}, {"./a.txt", "y"}}); }) == ErrorCode::DuplicatePath);
    CHECK(code_of([] { build_manifest({{"", "x"}}); }) == ErrorCode::InvalidPath);
    CHECK(code_of([] { build_manifest({{"/etc/passwd", "x"}}); }) == ErrorCode::InvalidPath);
    CHECK(code_of([] { build_manifest({{"../up.txt", "x"}}); }) == ErrorCode::InvalidPath);
    CHECK(code_of([] { build_manifest({{"a/../b.txt", "x"}}); }) == ErrorCode::InvalidPath);
}

TEST_CASE("normalize_path canonical forms") {
    CHECK(normalize_path("a/b.txt") == "a/b.txt");
    CHECK(normalize_path("./a/b.txt") == "a/b.txt");
    CHECK(normalize_path("a//b.txt") == "a/b.txt");
    CHECK(normalize_path("a\\b.txt") == "a/b.txt");
    CHECK(normalize_path("a/./b.txt") == "a/b.txt");
    CHECK(code_of([] { normalize_path("."); }) == ErrorCode::InvalidPath);
}

TEST_CASE("normalize_archive: externally-built archives with differing timestamps agree") {
    std::string t1 = read_file(fixture_dir() + "/fixture_t1.zip");
    std::string t2 = read_file(fixture_dir() + "/fixture_t2.zip");
    std::string reordered = read_file(fixture_dir() + "/fixture_order.zip");
    std::string with_dirs = read_file(fixture_dir() + "/fixture_dirs.zip");
    REQUIRE(digest_bytes(t1) != digest_bytes(t2));  // containers differ

    HashManifest m1 = normalize_archive(t1, ArchiveFormat::Zip);
    HashManifest m2 = normalize_archive(t2, ArchiveFormat::Zip);
    HashManifest m3 = normalize_archive(reordered, ArchiveFormat::Zip);
    HashManifest m4 = normalize_archive(with_dirs, ArchiveFormat::Zip);
    CHECK(m1.manifest_digest().hex() == kFixturePayloadDigest);
    CHECK(m1 == m2);
    CHECK(m1 == m3);  // order + compression method ignored
    CHECK(m1 == m4);  // directory entries excluded
    REQUIRE(m1.entries().size() == 3);
    CHECK(m1.entries()[0].path == "a.txt");
    CHECK(m1.entries()[1].path == "data/b.bin");
    CHECK(m1.entries()[2].path == "empty.txt");
}

TEST_CASE("normalize_archive error paths") {
    std::string t1 = read_file(fixture_dir() + "/fixture_t1.zip");

    SUBCASE("non-zip bytes are UnsupportedFormat") {
        CHECK(code_of([] { normalize_archive("plain text, not an archive", ArchiveFormat::Zip); }) ==
              ErrorCode::UnsupportedFormat);
    }
    SUBCASE("truncation is CorruptArchive") {
        std::string truncated = t1.substr(0, t1.size() / 2);
        CHECK(code_of([&] { normalize_archive(truncated, ArchiveFormat::Zip); }) == ErrorCode::CorruptArchive);
    }
    SUBCASE("flipped payload byte fails the CRC check") {
        // Flip a byte inside the first entry's compressed data (after the
        // 30-byte local header + name).
        std::string corrupted = t1;
        corrupted[40] = static_cast<char>(corrupted[40] ^ 0x01);
        CHECK(code_of([&] { normalize_archive(corrupted, ArchiveFormat::Zip); }) == ErrorCode::CorruptArchive);
    }
    SUBCASE("duplicate entry paths inside the archive are rejected") {
        std::string dup = zip::build({{"x.txt", "one"}, {"./x.txt", "two"}}, {});
        CHECK(code_of([&] { normalize_archive(dup, ArchiveFormat::Zip); }) == ErrorCode::DuplicatePath);
    }
}

TEST_CASE("zip::build output parses back and round-trips payloads") {
    std::vector<zip::BuildEntry> entries{{"a.txt", "alpha\n"}, {"nested/deep/b.bin", std::string(1000, 'z')},
                                         {"empty", ""}};
    for (int level : {0, 1, 6, 9}) {
        zip::BuildOptions opts;
        opts.compression_level = level;
        std::string archive = zip::build(entries, opts);
        auto extracted = zip::extract_all(archive);
        REQUIRE(extracted.size() == entries.size());
        for (std::size_t i = 0; i < entries.size(); ++i) {
            CHECK(extracted[i].path == entries[i].path);
            CHECK(extracted[i].data == entries[i].data);
        }
    }
}

TEST_CASE("zip::build is deterministic and timestamp-sensitive in raw form only") {
    std::vector<zip::BuildEntry> entries{{"a.txt", "same payload"}};
    zip::BuildOptions at_t1, at_t2;
    at_t1.dos_datetime = zip::dos_datetime_from_epoch(1577836800);  // 2020-01-01
    at_t2.dos_datetime = zip::dos_datetime_from_epoch(1700000000);
    CHECK(zip::build(entries, at_t1) == zip::build(entries, at_t1));
    CHECK(zip::build(entries, at_t1) != zip::build(entries, at_t2));
    CHECK(normalize_archive(zip::build(entries, at_t1), ArchiveFormat::Zip) ==
          normalize_archive(zip::build(entries, at_t2), ArchiveFormat::Zip));
}

TEST_CASE("archive metadata invariance over randomized payloads") {
    std::mt19937 rng(2024);
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<zip::BuildEntry> entries;
        int n = 1 + static_cast<int>(rng() % 6);
        for (int i = 0; i < n; ++i) {
            std::string content(rng() % 512, '\0');
            for (auto& c : content) c = static_cast<char>(rng() & 0xff);
            entries.push_back({"dir" + std::to_string(i % 2) + "/f" + std::to_string(i), std::move(content)});
        }
        zip::BuildOptions a, b;
        a.dos_datetime = zip::dos_datetime_from_epoch(1600000000 + static_cast<int>(rng() % 100000) * 2);
        a.compression_level = static_cast<int>(rng() % 10);
        b.dos_datetime = zip::dos_datetime_from_epoch(1700000000 + static_cast<int>(rng() % 100000) * 2);
        b.compression_level = static_cast<int>(rng() % 10);
        auto shuffled = entries;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);

        HashManifest ma = normalize_archive(zip::build(entries, a), ArchiveFormat::Zip);
        HashManifest mb = normalize_archive(zip::build(shuffled, b), ArchiveFormat::Zip);
        CHECK(ma == mb);
    }
}

TEST_CASE("single byte flips change file digest and manifest digest") {
    std::string content = "sensitive measurement data 0123456789";
    HashManifest base = build_manifest({{"d.txt", content}});
    std::mt19937 rng(5);
    for (int i = 0; i < 20; ++i) {
        std::string mutated = content;
        std::size_t pos = rng() % mutated.size();
        mutated[pos] = static_cast<char>(mutated[pos] ^ (1 + rng() % 255));
        HashManifest changed = build_manifest({{"d.txt", mutated}});
        CHECK(changed.entries()[0].digest != base.entries()[0].digest);
        CHECK(!(changed == base));
    }
}

TEST_CASE("content_identity recognizes archives and falls back to opaque bytes") {
    std::string archive = zip::build({{"a.txt", "alpha"}}, {});
    ContentIdentity zip_id = content_identity(archive);
    CHECK(zip_id.is_archive);
    CHECK(zip_id.manifest.entries()[0].path == "a.txt");

    ContentIdentity raw_id = content_identity("just bytes");
    CHECK(!raw_id.is_archive);
    REQUIRE(raw_id.manifest.entries().size() == 1);
    CHECK(raw_id.manifest.entries()[0].path == "data");
    CHECK(raw_id.manifest.entries()[0].digest == digest_bytes("just bytes"));
}

TEST_CASE("probe_stability verdicts") {
    SUBCASE("identical bytes are Stable") {
        auto fetch = [](int) { return std::string("constant payload"); };
        StabilityResult r = probe_stability(fetch, 2);
        CHECK(r.verdict == StabilityVerdict::Stable);
        CHECK(r.raw_digests.size() == 2);
    }
    SUBCASE("recompressed archives with equal contents are ContainerNondeterminism") {
        auto fetch = [](int attempt) {
            zip::BuildOptions opts;
            opts.dos_datetime = zip::dos_datetime_from_epoch(1600000000 + attempt * 7200);
            return zip::build({{"obs.csv", "t,v\n1,2\n"}}, opts);
        };
        StabilityResult r = probe_stability(fetch, 3);
        CHECK(r.verdict == StabilityVerdict::ContainerNondeterminism);
        CHECK(r.payload_is_archive);
        CHECK(r.raw_digests[0] != r.raw_digests[1]);
    }
    SUBCASE("changed non-archive bytes are ContentDrift") {
        auto fetch = [](int attempt) { return "payload v" + std::to_string(attempt); };
        CHECK(probe_stability(fetch, 2).verdict == StabilityVerdict::ContentDrift);
    }
    SUBCASE("changed archive contents are ContentDrift") {
        auto fetch = [](int attempt) {
            return zip::build({{"obs.csv", "version " + std::to_string(attempt)}}, {});
        };
        CHECK(probe_stability(fetch, 2).verdict == StabilityVerdict::ContentDrift);
    }
    SUBCASE("fetch failure propagates with the attempt index") {
        auto fetch = [](int attempt) -> std::string {
            if (attempt == 2) throw Error(ErrorCode::NotFound, "gone");
            return "ok";
        };
        try {
            probe_stability(fetch, 2);
            FAIL("expected FetchFailed");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::FetchFailed);
            CHECK(std::string(e.what()).find("attempt 2") != std::string::npos);
        }
    }
    SUBCASE("n below 2 is rejected") {
        auto fetch = [](int) { return std::string("x"); };
        CHECK_THROWS_AS(probe_stability(fetch, 1), Error);
    }
}

TEST_CASE("probe verdict agrees with brute-force re-derivation") {
    std::mt19937 rng(99);
    for (int trial = 0; trial < 30; ++trial) {
        bool archive_mode = rng() % 2 == 0;
        bool mutate = rng() % 2 == 0;
        bool restamp = rng() % 2 == 0;
        auto fetch = [&, archive_mode, mutate, restamp](int attempt) -> std::string {
            std::string content = "base";
            if (mutate) content += std::to_string(attempt);
            if (!archive_mode) return content;
            zip::BuildOptions opts;
            opts.dos_datetime =
                zip::dos_datetime_from_epoch(1600000000 + (restamp ? attempt * 7200 : 0));
            return zip::build({{"f", content}}, opts);
        };
        StabilityResult r = probe_stability(fetch, 2 + static_cast<int>(rng() % 3));
        CHECK(r.verdict == derive_verdict(r.raw_digests, r.content_manifests));
    }
}
