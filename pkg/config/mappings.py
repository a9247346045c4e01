"""
Lookup tables translating command-line spellings to engine names and back
"""

# Root search strategies
STRATEGY_ALIASES = {
    "inc": "incremental",
    "dec": "decremental",
    "brute": "brute-force",
}

# Fisher test tails
TAIL_ALIASES = {
    "one": "one",
    "two": "two",
}

# How the positive class relates to the label file
LABEL_ORIENTATIONS = {
    "as_given": "as-given",
    "swapped": "swapped",
    "balanced": "balanced",
    "synthetic": "synthetic-ratio",
}

# Process exit codes
EXIT_CODES = {
    "ok": 0,
    "input_error": 2,
    "degenerate_data": 3,
}

# Column layout of patterns.tsv
PATTERN_COLUMNS = ["items", "support", "a", "p_value", "log10_p"]

# Column layout of compare.tsv
COMPARE_COLUMNS = ["correction", "max_order", "factor", "log10_factor"]
