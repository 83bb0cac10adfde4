"""Allen-Cahn layer and saddle-shaped solutions."""
