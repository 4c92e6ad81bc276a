"""Graph passes: classical flow, quantum node construction, quantum flow."""
