# Backend package initialization
