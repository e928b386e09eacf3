"""sletree test suite."""
