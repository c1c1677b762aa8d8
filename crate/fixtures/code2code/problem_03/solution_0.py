def max_length(vehicles):
    return max(vehicle.length for vehicle in vehicles)
