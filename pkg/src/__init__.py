"""
weavelab
A weaving-frame laboratory for C^d: frames, woven pairs and numerical checks
of the weaving identities
"""

__version__ = "1.0.0"
