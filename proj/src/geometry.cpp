// geometry module: implementation arrives with the geometry engine
