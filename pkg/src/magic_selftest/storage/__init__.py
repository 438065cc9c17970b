from __future__ import annotations

from magic_selftest.storage.records import (
    SIGNIFICANT_DIGITS,
    LineRecordWriter,
    encode_record,
    iter_line_records,
    make_header,
    read_line_records,
    round_significant,
    write_line_records,
)

__all__ = [
    "SIGNIFICANT_DIGITS",
    "LineRecordWriter",
    "encode_record",
    "iter_line_records",
    "make_header",
    "read_line_records",
    "round_significant",
    "write_line_records",
]
