// experiments module: implementation arrives with the sweep drivers
