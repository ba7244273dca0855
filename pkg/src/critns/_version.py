__version__ = "0.1.0"

# bumped when any serialized schema (CNSF, JSONL, CSV, report JSON) changes
FORMAT_VERSION = 1
