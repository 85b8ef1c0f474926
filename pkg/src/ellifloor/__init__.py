"""Classical and refined floor-diagram invariants of line bundles over an elliptic curve."""
