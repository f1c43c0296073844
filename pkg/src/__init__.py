"""
P^3 stability walls toolkit package.
"""
