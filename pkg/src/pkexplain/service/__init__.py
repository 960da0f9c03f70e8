"""HTTP service exposing the attribution engine over JSON."""
