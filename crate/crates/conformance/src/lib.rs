//! Holds the `acceptance` integration test target. Each test there prints
//! one `criterion N: PASS` or `criterion N: FAIL (...)` line.
