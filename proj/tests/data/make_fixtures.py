#!/usr/bin/env python3
"""Builds the ZIP fixtures used by the archive-normalization tests.

The archives are produced with the standard-library zipfile module so the
C++ reader is exercised against an independent writer. Re-run from this
directory if the payload set changes, then refresh the digests frozen in
tests/fixity_test.cpp (this script prints them).
"""

import hashlib
import zipfile

PAYLOAD = [
    ("a.txt", b"alpha\n"),
    ("data/b.bin", bytes(range(256)) * 4),
    ("empty.txt", b""),
]


def write_zip(name, entries, date_time, compression, with_dirs=False):
    with zipfile.ZipFile(name, "w") as zf:
        if with_dirs:
            info = zipfile.ZipInfo("data/", date_time=date_time)
            info.external_attr = 0o40775 << 16
            zf.writestr(info, b"")
        for path, content in entries:
            info = zipfile.ZipInfo(path, date_time=date_time)
            zf.writestr(info, content, compress_type=compression)


def manifest_digest(entries):
    lines = []
    for path, content in sorted(entries):
        lines.append(hashlib.sha256(content).hexdigest() + "  " + path + "\n")
    text = "".join(lines).encode()
    return hashlib.sha256(text).hexdigest()


def main():
    write_zip("fixture_t1.zip", PAYLOAD, (2020, 1, 1, 0, 0, 0), zipfile.ZIP_DEFLATED)
    write_zip("fixture_t2.zip", PAYLOAD, (2021, 6, 15, 12, 34, 56), zipfile.ZIP_DEFLATED)
    write_zip("fixture_order.zip", list(reversed(PAYLOAD)), (2019, 3, 3, 3, 3, 2), zipfile.ZIP_STORED)
    write_zip("fixture_dirs.zip", PAYLOAD, (2020, 1, 1, 0, 0, 0), zipfile.ZIP_DEFLATED, with_dirs=True)
    print("payload manifest digest:", manifest_digest(PAYLOAD))
    for path, content in PAYLOAD:
        print(path, hashlib.sha256(content).hexdigest(), len(content))


if __name__ == "__main__":
    main()
