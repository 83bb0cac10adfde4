"""Hardy inequality quotients and inverse-square spectra."""
