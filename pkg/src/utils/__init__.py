"""Frame files, the verification driver and report writers"""
