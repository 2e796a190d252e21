version = 'feaslab 0.3'
